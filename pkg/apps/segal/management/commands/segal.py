from apps.posets.serializers import parse_order_or_category
from apps.posets.structures import FinitePoset
from core.utils.commands import CommandResult, SimplicialCommand
from ...serializers import SegalReportSerializer
from ...utils import segal_report


class Command(SimplicialCommand):
    help = 'Условие Сигала, обратимые морфизмы и полнота для нерва конечной категории'
    input_help = 'JSON категории (objects/morphisms/compose) или порядка (elements/leq)'

    def add_command_arguments(self, parser):
        parser.add_argument('--n-max', type=int, default=4, help='Старший уровень отображений Сигала')

    def run(self, config):
        C = parse_order_or_category(self.load_input(config))
        if isinstance(C, FinitePoset):
            C = C.as_category()
        report = segal_report(C, config.extra['n_max'], k_max=min(config.trunc, 2))
        lines = [f'{report.name or "-"}: Сигал до n={report.n_max}: {"да" if report.segal else "нет"}']
        lines += [
            f'  n={level.n}: ячеек {level.cells}, произведение {level.fiber_product}'
            for level in report.levels
        ]
        completeness = report.completeness
        lines.append(f'  обратимые: {", ".join(map(str, completeness.invertibles)) or "-"}')
        lines.append(f'  полнота: {"да" if completeness.complete else "нет"}')
        lines.append(f'  s_0: X_0 -> X_1: {"эквивалентность" if report.degeneracy.passed else "нет"}')
        return CommandResult(
            payload=SegalReportSerializer(report).data,
            text='\n'.join(lines),
            ok=report.segal,
        )
