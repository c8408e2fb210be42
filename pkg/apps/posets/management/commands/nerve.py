from apps.posets.serializers import parse_order_or_category
from apps.posets.utils import nerve
from apps.simplicial.serializers import SimplicialSetSerializer
from core.utils.commands import CommandResult, SimplicialCommand


class Command(SimplicialCommand):
    help = 'Нерв конечного порядка или конечной категории'
    input_help = 'JSON с elements/leq (порядок) или objects/morphisms/compose (категория)'

    def run(self, config):
        C = parse_order_or_category(self.load_input(config))
        X = nerve(C, config.trunc)
        lines = [f'N({C.name or "-"}): d_max={X.d_max}']
        lines += [f'  {n}: {len(gens)}' for n, gens in enumerate(X.generators)]
        return CommandResult(payload=SimplicialSetSerializer(X).data, text='\n'.join(lines))
