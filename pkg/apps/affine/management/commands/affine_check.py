from core.utils.commands import CommandResult, SimplicialCommand
from ...serializers import IdentityReportSerializer, NaturalityVerdictSerializer
from ...utils import check_cosimplicial_identities, naturality_sweep


class Command(SimplicialCommand):
    help = 'Косимплициальные тождества Δ_e и естественность вложения |Δ| -> Δ_e'
    takes_input = False

    def add_command_arguments(self, parser):
        parser.add_argument('--n-max', type=int, default=5, help='Старшая размерность для тождеств')
        parser.add_argument(
            '--naturality-max', type=int, default=3, help='Перебор σ: [n] -> [k] с n, k не больше этого',
        )

    def run(self, config):
        report = check_cosimplicial_identities(config.extra['n_max'])
        verdicts = naturality_sweep(config.extra['naturality_max'])
        broken = [v for v in verdicts if not v.commutes]
        payload = {
            'identities': IdentityReportSerializer(report).data,
            'naturality': {
                'checked': len(verdicts),
                'passed': not broken,
                'failures': NaturalityVerdictSerializer(broken, many=True).data,
            },
        }
        lines = [
            f'Тождества до n={report.n_max}: проверено {report.checked}, нарушений {len(report.failures)}',
            f'Сохранение Σ t = 1: {"да" if report.hyperplane else "нет"}',
            f'Естественность ι: {len(verdicts) - len(broken)} из {len(verdicts)}',
        ]
        return CommandResult(payload=payload, text='\n'.join(lines), ok=report.passed and not broken)
