from apps.homology.serializers import HomologyDegreeSerializer, WeqCertificateSerializer
from apps.homology.utils import simplicial_homology, weq_certificate
from apps.posets.serializers import ExComplexSerializer
from apps.simplicial.serializers import SimplicialSetSerializer
from core.exceptions import SchemaError
from core.utils.commands import CommandResult, SimplicialCommand, resolve_input
from core.utils.jsonio import deserialize, read_json
from ...serializers import DiagramSerializer
from ...structures import CONTRAVARIANT, COVARIANT
from ...utils import bar, bar_comparison, bar_ex_complex, point_weight


class Command(SimplicialCommand):
    help = 'Двусторонняя бар-конструкция B(F, I, E); без --weight это hocolim E'
    input_help = 'JSON ковариантной диаграммы E (shape, values, maps)'

    def add_command_arguments(self, parser):
        parser.add_argument('--weight', type=str, default=None, help='JSON контравариантного веса F')
        parser.add_argument(
            '--ex',
            action='store_true',
            help='Построить также B_Ex и сертификат для сравнения b: B -> B_Ex',
        )

    def load_diagram(self, path, variance):
        D = deserialize(DiagramSerializer, read_json(path))
        if D.variance != variance:
            raise SchemaError(f'{path}: ожидалась {variance} диаграмма', path=str(path))
        return D

    def run(self, config):
        E = self.load_diagram(config.inputs[0], COVARIANT)
        I = E.shape
        weight = config.extra.get('weight')
        if weight:
            F = self.load_diagram(resolve_input(weight), CONTRAVARIANT)
        else:
            F = point_weight(I, config.trunc)
        B = bar(F, I, E, config.trunc)
        H = simplicial_homology(B)
        payload = {
            'bar': SimplicialSetSerializer(B).data,
            'homology': HomologyDegreeSerializer(H, many=True).data,
        }
        lines = [f'{B.name}: образующие {list(B.counts())}', f'  H = {H}']
        ok = True
        if config.extra.get('ex'):
            B_ex = bar_ex_complex(F, I, E, config.trunc, config.cap)
            certificate = weq_certificate(
                bar_comparison(F, I, E, config.trunc, config.cap, source=B, target=B_ex)
            )
            ok = certificate.passed
            payload['bar_ex'] = ExComplexSerializer(B_ex).data
            payload['bar_ex_homology'] = HomologyDegreeSerializer(
                simplicial_homology(B_ex.simplicial_set), many=True,
            ).data
            payload['comparison'] = WeqCertificateSerializer(certificate).data
            lines.append(f'{B_ex.simplicial_set.name}: образующие {list(B_ex.simplicial_set.counts())}')
            lines.append(f'  b: {"эквивалентность" if ok else "не эквивалентность"} (степени < {certificate.trunc})')
        return CommandResult(payload=payload, text='\n'.join(lines), ok=ok)
