from core.utils.commands import CommandResult, SimplicialCommand
from core.utils.jsonio import deserialize
from ...pipeline import whitehead_pipeline
from ...serializers import CoverComplexSerializer, WhiteheadReportSerializer
from ...tasks import run_whitehead_pipeline


class Command(SimplicialCommand):
    help = 'Конвейер теоремы о нерве: гомологии ČU, B и B_Ex, сертификаты ψ и φ, φ∘ψ, RLP для φ'
    input_help = 'JSON покрытия с reference_homology или reference'

    def add_command_arguments(self, parser):
        parser.add_argument('--ex-trunc', type=int, default=None, help='Усечение B_Ex (по умолчанию --trunc)')
        parser.add_argument(
            '--rlp-max-dim',
            type=int,
            default=None,
            help='Наибольшее n для квадратов ∂Δ^n -> Δ^n (по умолчанию WHITEHEAD_RLP_MAX_DIM)',
        )
        parser.add_argument(
            '--async',
            dest='run_async',
            action='store_true',
            help='Поставить конвейер в очередь Celery и вывести id задачи',
        )

    def run(self, config):
        payload = self.load_input(config)
        cov = deserialize(CoverComplexSerializer, payload)
        ex_trunc = config.extra.get('ex_trunc')
        rlp_max_dim = config.extra.get('rlp_max_dim')
        if config.extra.get('run_async'):
            result = run_whitehead_pipeline.delay(payload, config.trunc, ex_trunc, rlp_max_dim, config.cap)
            return CommandResult(
                payload={'task_id': result.id, 'cover': cov.name},
                text=f'Задача {result.id} поставлена в очередь ({cov.name})',
            )

        report = whitehead_pipeline(cov, config.trunc, ex_trunc, rlp_max_dim, config.cap)
        lines = [f'{report.cover}: trunc={report.trunc}, ex_trunc={report.ex_trunc}']
        for name, result in report.homology.items():
            lines.append(f'  {name}: {result}')
        lines.append(f'  эталон: ({", ".join(str(g) for g in report.reference)})')
        lines.append(f'  гомологии согласованы: {"да" if report.homology_agrees else f"нет, степень {report.first_mismatch}"}')
        lines.append(f'  ψ: {"пройден" if report.psi else "не пройден"}, φ: {"пройден" if report.phi else "не пройден"}')
        lines.append(f'  φ∘ψ = ČU ↪ ČU^cl: {"да" if report.factorization else "нет"}')
        for d in report.rlp.dimensions:
            lines.append(
                f'  RLP n={d.n}: квадратов {d.squares}, реализуемых {d.realizable}, '
                f'поднято {d.realizable_lifted}, явных поднятий {d.constructive_valid}/{d.constructive_checked}'
            )
        lines.extend(f'  примечание: {note}' for note in report.notes)
        return CommandResult(
            payload=WhiteheadReportSerializer(report).data,
            text='\n'.join(lines),
            ok=report.passed,
        )
