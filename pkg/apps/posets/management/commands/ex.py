from apps.posets.ex import ex, ex_nerve_category, ex_nerve_poset, last_vertex_map
from apps.posets.serializers import ComparisonMapSerializer, ExComplexSerializer, parse_order_or_category
from apps.posets.structures import FinitePoset
from apps.simplicial.serializers import SimplicialSetSerializer
from core.utils.commands import CommandResult, SimplicialCommand
from core.utils.jsonio import deserialize


class Command(SimplicialCommand):
    help = 'Ex симплициального множества (перебором отображений Sd Δ^n -> X) или нерва порядка/категории'
    input_help = 'JSON симплициального множества, порядка или категории'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--last-vertex',
            action='store_true',
            help='Добавить отображение последней вершины b: X -> Ex X (только для симплициальных множеств)',
        )

    def run(self, config):
        payload = self.load_input(config)
        if isinstance(payload, dict) and 'd_max' in payload:
            X = deserialize(SimplicialSetSerializer, payload)
            E = ex(X, config.trunc, config.cap)
        else:
            C = parse_order_or_category(payload)
            build = ex_nerve_poset if isinstance(C, FinitePoset) else ex_nerve_category
            X = None
            E = build(C, config.trunc, config.cap)
        result = {'ex': ExComplexSerializer(E).data}
        if config.extra.get('last_vertex') and X is not None:
            result['last_vertex'] = ComparisonMapSerializer(last_vertex_map(X, target=E)).data
        lines = [f'{E.simplicial_set.name}: trunc={E.trunc}']
        lines += [
            f'  {n}: всего {E.size(n)}, невырожденных {E.simplicial_set.count(n)}'
            for n in range(E.trunc + 1)
        ]
        return CommandResult(payload=result, text='\n'.join(lines))
