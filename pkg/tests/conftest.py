import random

import pytest

from bamcbr.cbr.database import CaseDatabase
from bamcbr.cbr.schema import Action, Case, Problem
from bamcbr.binding.config import (
    BamCbrConfig,
    build_schema,
    similarity_config,
    switch_action,
    tolerance_values,
)
from bamcbr.sim.link import LinkConfig

MODELS = ("MAM", "RDM", "ATCS")


@pytest.fixture
def cfg():
    return BamCbrConfig()


@pytest.fixture
def schema(cfg):
    return build_schema(cfg)


@pytest.fixture
def sim_config(cfg, schema):
    return similarity_config(cfg, schema)


@pytest.fixture
def link():
    return LinkConfig(capacity=100.0, bc_mam=(40.0, 30.0, 30.0),
                      bc_rdm=(100.0, 60.0, 30.0))


def make_problem(cfg=None, bam="MAM", throughput=1.0, blocking=0.0,
                 devolution=0.0, preemption=0.0, utilization=0.3):
    cfg = cfg or BamCbrConfig()
    return Problem(
        sa={"capacity": 100.0, "classes": 3.0},
        ca={"bam": bam},
        m={"throughput": throughput, "blocking": blocking,
           "devolution": devolution, "preemption": preemption,
           "utilization": utilization},
        t=tolerance_values(cfg),
    )


def random_problem(rng: random.Random, cfg=None):
    cfg = cfg or BamCbrConfig()
    return make_problem(
        cfg,
        bam=rng.choice(MODELS),
        throughput=rng.random(),
        blocking=rng.random(),
        devolution=rng.uniform(0, cfg.count_cap),
        preemption=rng.uniform(0, cfg.count_cap),
        utilization=rng.random(),
    )


def make_case(schema, problem, case_id="c1", target="ATCS", outcome="positive",
              created_at=0.0, valid_until=None, confidence=1.0):
    return Case(
        id=case_id,
        problem=problem,
        solution=(switch_action(target),),
        outcome=outcome,
        confidence=confidence,
        created_at=created_at,
        valid_until=valid_until,
        context_signature=schema.context_signature(problem),
    )


@pytest.fixture
def db(schema):
    return CaseDatabase(schema)
