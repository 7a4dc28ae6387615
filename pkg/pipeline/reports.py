"""
Step reports. Each command of a step merges its own section into
`report.json` under the step's output directory; `curator report` reads
any number of them back and renders a summary.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Sequence

import dataclass_factory

from pipeline.exceptions import ReportError
from pipeline.serializers import StepReportSerializer
from pipeline.types import StepReport
from websource.serializers import first_error


logger = logging.getLogger(__name__)

REPORT_FILE = 'report.json'
RUN_CONFIG_FILE = 'run-config.json'
SECTIONS = ('acquisition', 'rehearsal', 'training')

_factory = dataclass_factory.Factory()


def _dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def report_to_dict(report: StepReport, timings: bool = False) -> dict:
    data = _factory.dump(report)
    if not timings:
        data.pop('wall_time', None)
    return {key: value for key, value in data.items() if value is not None}


def validate_report(data, path=None) -> dict:
    serializer = StepReportSerializer(data=data)
    if not isinstance(data, dict) or not serializer.is_valid():
        errors = serializer.errors if isinstance(data, dict) else {'report': ['not an object']}
        where = f'{path}: ' if path is not None else ''
        raise ReportError(f'{where}invalid report: {first_error(errors)}')
    return data


def load_report(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise ReportError(f'cannot read report {path}: {e}') from e
    except json.JSONDecodeError as e:
        raise ReportError(f'{path}: invalid JSON: {e.msg}') from e
    return validate_report(data, path)


def merge_report(existing: dict | None, report: StepReport, timings: bool = False) -> dict:
    """Fold one command's sections into the step report written so far"""
    new = report_to_dict(report, timings)
    if existing is None:
        return new
    if (existing['protocol'], existing['step']) != (new['protocol'], new['step']):
        raise ReportError(
            f'report for {existing["protocol"]} step {existing["step"]} cannot take '
            f'{new["protocol"]} step {new["step"]}'
        )
    merged = dict(existing)
    merged['config'] = {**existing.get('config', {}), **new['config']}
    for section in SECTIONS:
        if section in new:
            merged[section] = new[section]
    if 'wall_time' in new:
        merged['wall_time'] = {**(existing.get('wall_time') or {}), **new['wall_time']}
    return merged


def write_report(report: StepReport, out_dir, timings: bool = False) -> Path:
    path = Path(out_dir) / REPORT_FILE
    existing = load_report(path) if path.exists() else None
    data = validate_report(merge_report(existing, report, timings), path)
    path.write_text(_dumps(data), encoding='utf-8')
    return path


def write_run_config(out_dir, command: str, options: dict, wall_time: float) -> Path:
    """Echo of what was run; not covered by the byte-identity of outputs"""
    path = Path(out_dir) / RUN_CONFIG_FILE
    runs = json.loads(path.read_text(encoding='utf-8')) if path.exists() else {}
    runs[command] = {'options': options, 'wall_time': wall_time}
    path.write_text(json.dumps(runs, indent=2, sort_keys=True, default=str) + '\n',
                    encoding='utf-8')
    return path


def summarize(reports: Sequence[dict]) -> dict:
    if not reports:
        raise ReportError('no reports to summarize')
    ordered = sorted(reports, key=lambda r: r['step'])
    return {
        'protocols': sorted({r['protocol'] for r in ordered}),
        'steps': ordered,
    }


def render_text(summary: dict) -> str:
    lines = []
    for report in summary['steps']:
        lines.append(f'== {report["protocol"]} step {report["step"]} ==')
        acquisition = report.get('acquisition')
        if acquisition:
            lines.append('acquisition')
            lines.append(f'  {"class":<16}{"crawled":>9}{"gated":>9}{"labeled":>9}'
                         f'{"kept":>9}{"failed":>9}')
            for class_name, f in acquisition.items():
                lines.append(f'  {class_name:<16}{f["crawled"]:>9}{f["gated"]:>9}'
                             f'{f["labeled"]:>9}{f["kept"]:>9}{f["failed"]:>9}')
        rehearsal = report.get('rehearsal')
        if rehearsal:
            lines.append('rehearsal')
            lines.append(f'  retrieved {rehearsal["retrieved"]}, captioned '
                         f'{rehearsal["captioned"]}, filtered {rehearsal["filtered"]}, '
                         f'kept {rehearsal["kept"]}, failed queries '
                         f'{rehearsal["failed_queries"]}')
        training = report.get('training')
        if training:
            losses = training['losses']
            lines.append('training')
            lines.append(f'  {training["train_images"]} train and '
                         f'{training["rehearsal_images"]} rehearsal images, '
                         f'{training["epochs"]} epochs')
            lines.append(f'  loss {losses[0]:.6f} -> {losses[-1]:.6f}')
        lines.append('')
    return '\n'.join(lines)


def render_svg(summary: dict, path) -> Path | None:
    """Loss curves, one per step with training; None when there is nothing to plot"""
    curves = [(r, r['training']['losses']) for r in summary['steps'] if r.get('training')]
    if not curves:
        logger.info('no training sections, skipping the loss plot')
        return None

    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    plt.rcParams['svg.hashsalt'] = 'curator'
    fig, ax = plt.subplots(figsize=(6, 4))
    for report, losses in curves:
        ax.plot(range(len(losses)), losses,
                label=f'{report["protocol"]} step {report["step"]}')
    ax.set_xlabel('epoch')
    ax.set_ylabel('total loss')
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    return Path(path)
