from apps.homology.serializers import HomologyDegreeSerializer
from apps.homology.utils import simplicial_homology
from apps.simplicial.serializers import SimplicialSetSerializer
from core.utils.commands import CommandResult, SimplicialCommand
from core.utils.jsonio import deserialize
from ...serializers import CoverComplexSerializer
from ...utils import cech_nerve, closure


class Command(SimplicialCommand):
    help = 'Нерв Чеха покрытия в стянутой модели'
    input_help = 'JSON покрытия: index_set, nonempty, необязательно reference_homology'

    def add_command_arguments(self, parser):
        parser.add_argument('--closure', action='store_true', help='Нерв замыкания U^cl вместо U')
        parser.add_argument('--homology', action='store_true', help='Добавить гомологии нерва')

    def run(self, config):
        cov = deserialize(CoverComplexSerializer, self.load_input(config))
        if config.extra.get('closure'):
            cov = closure(cov)
        X = cech_nerve(cov, config.trunc)
        payload = SimplicialSetSerializer(X).data
        lines = [f'{X.name}: образующие {list(X.counts())}']
        if config.extra.get('homology'):
            H = simplicial_homology(X)
            payload = {'nerve': payload, 'homology': HomologyDegreeSerializer(H, many=True).data}
            lines.append(f'  H = {H}')
        return CommandResult(payload=payload, text='\n'.join(lines))
