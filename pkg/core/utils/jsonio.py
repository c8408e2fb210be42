# core/utils/jsonio.py
import json
import logging

from rest_framework import serializers

from core.exceptions import SchemaError

logger = logging.getLogger(__name__)


def dumps(payload) -> str:
    """Каноническая JSON-сериализация: порядок ключей сохраняется, перевод строки в конце"""
    return json.dumps(payload, indent=2, ensure_ascii=False) + '\n'


def read_json(path):
    try:
        with open(path, encoding='utf-8') as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f'{path}: некорректный JSON ({exc})', path=str(path)) from exc
    except OSError as exc:
        raise SchemaError(f'{path}: файл недоступен ({exc})', path=str(path)) from exc


def flatten_errors(detail, prefix=''):
    """Плоский список сообщений DRF вида 'поле.подполе: текст'"""
    if isinstance(detail, dict):
        result = []
        for key, value in detail.items():
            result.extend(flatten_errors(value, f'{prefix}{key}.'))
        return result
    if isinstance(detail, list):
        result = []
        for idx, value in enumerate(detail):
            if isinstance(value, (dict, list)):
                result.extend(flatten_errors(value, f'{prefix}{idx}.'))
            else:
                result.extend(flatten_errors(value, prefix))
        return result
    return [f'{prefix.rstrip(".") or "payload"}: {detail}']


def deserialize(serializer_class, payload, many=False, **context):
    """Проверяет payload сериализатором и возвращает построенный объект"""
    serializer = serializer_class(data=payload, many=many, context=context)
    try:
        serializer.is_valid(raise_exception=True)
        return serializer.save()
    except serializers.ValidationError as exc:
        errors = flatten_errors(exc.detail)
        logger.info('Отклонён payload %s: %s', serializer_class.__name__, errors)
        raise SchemaError(
            f'{serializer_class.__name__}: данные не соответствуют схеме', errors=errors
        ) from exc


def serialize(serializer_class, instance, **context):
    return serializer_class(instance, context=context).data
