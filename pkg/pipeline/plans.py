"""
Plan files describe one incremental step as `key = value` lines:

    # VOC 15-5, overlapped, first incremental step
    protocol = 15-5
    step = 1
    old_classes = aeroplane, bicycle, bird, ...
    new_classes = potted plant, sheep, sofa, train, tv
    overlapped = true

`#` starts a comment. Class lists are comma separated since class names
may contain spaces. Keys left out take their defaults.
"""
from __future__ import annotations

import logging
from pathlib import Path

import dataclass_factory

from pipeline.exceptions import PlanError
from pipeline.serializers import PlanSerializer
from pipeline.types import StepPlan
from websource.serializers import first_error


logger = logging.getLogger(__name__)

PLANS_DIR = Path(__file__).resolve().parent / 'plans'

_factory = dataclass_factory.Factory()


def parse_plan(text: str, path=None, defaults: dict | None = None) -> StepPlan:
    values = dict(defaults or {})
    seen = {}
    known = set(PlanSerializer().fields)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise PlanError('expected `key = value`', path, lineno)
        if key not in known:
            raise PlanError(f'unknown key `{key}`', path, lineno)
        if key in seen:
            raise PlanError(f'`{key}` already set on line {seen[key]}', path, lineno)
        seen[key] = lineno
        values[key] = value.strip()

    serializer = PlanSerializer(data=values)
    if not serializer.is_valid():
        raise PlanError(first_error(serializer.errors), path)
    return _factory.load(dict(serializer.validated_data), StepPlan)


def load_plan(path, defaults: dict | None = None) -> StepPlan:
    path = Path(path)
    if not path.exists() and not path.suffix:
        path = PLANS_DIR / f'{path.name}.plan'
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise PlanError(f'cannot read plan: {e}', path) from e
    plan = parse_plan(text, path, defaults)
    logger.info('plan %s: step %d of %s, %d old and %d new classes', path.name,
                plan.step, plan.protocol, len(plan.old_classes), len(plan.new_classes))
    return plan


def plan_to_dict(plan: StepPlan) -> dict:
    return _factory.dump(plan)
