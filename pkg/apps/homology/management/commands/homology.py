from apps.homology.serializers import ChainComplexSerializer, HomologyDegreeSerializer
from apps.homology.utils import homology, normalized_chains
from apps.simplicial.serializers import SimplicialSetSerializer
from core.utils.commands import CommandResult, SimplicialCommand
from core.utils.jsonio import deserialize


class Command(SimplicialCommand):
    help = 'Целочисленные гомологии симплициального множества через нормальную форму Смита'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--export-chains',
            action='store_true',
            help='Добавить в вывод граничные матрицы нормализованного комплекса',
        )

    def run(self, config):
        X = deserialize(SimplicialSetSerializer, self.load_input(config))
        trunc = min(config.trunc, X.d_max)
        C = normalized_chains(X, trunc)
        result = homology(C)
        payload = HomologyDegreeSerializer(result, many=True).data
        if config.extra.get('export_chains'):
            payload = {'homology': payload, 'chains': ChainComplexSerializer(C).data}
        lines = [
            f'H_{k} = {group}' + ('' if result.reliable(k) else '  (ненадёжно: усечение)')
            for k, group in enumerate(result.groups)
        ]
        return CommandResult(payload=payload, text='\n'.join(lines))
