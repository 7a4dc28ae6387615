from rest_framework import serializers


class ManifestRecordSerializer(serializers.Serializer):
    id = serializers.CharField(max_length=256)
    file = serializers.CharField(max_length=1024)
    keywords = serializers.ListField(child=serializers.CharField(), required=False,
                                     default=list)
    caption = serializers.CharField(required=False, allow_blank=True, allow_null=True,
                                    trim_whitespace=False)
    classes = serializers.ListField(child=serializers.CharField(), required=False,
                                    default=list)


class MemoryEntrySerializer(serializers.Serializer):
    classes = serializers.ListField(child=serializers.CharField(), allow_empty=True)
    caption = serializers.CharField(allow_blank=True, trim_whitespace=False)


def first_error(errors) -> str:
    """Flatten DRF's error dict into one readable line"""
    field_name, messages = next(iter(errors.items()))
    if isinstance(messages, dict):
        return f'{field_name}: {first_error(messages)}'
    return f'{field_name}: {messages[0]}'
