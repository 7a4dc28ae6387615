from rest_framework import serializers

from pipeline.types import Labeling, RehearsalMode, RehearsalQuery, TrainSource


class CommaListField(serializers.Field):
    """
    Comma separated plan value turned into a tuple of stripped names
    (e.g. 'dining table, dog' is ('dining table', 'dog'))
    """
    default_error_messages = {
        'empty_item': 'Empty name in list `{input}`.',
        'repeated': 'Repeated names in list `{input}`.',
    }

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            items = [str(d).strip() for d in data]
        else:
            items = [d.strip() for d in str(data).split(',')] if str(data).strip() else []
        if any(not item for item in items):
            self.fail('empty_item', input=data)
        if len(set(items)) != len(items):
            self.fail('repeated', input=data)
        return tuple(items)

    def to_representation(self, value):
        return ', '.join(value)


class NounCountField(serializers.Field):
    """Positive integer or `all`, the latter loaded as None"""
    default_error_messages = {
        'invalid': 'Expected a positive integer or `all`, got `{input}`.',
    }

    def to_internal_value(self, data):
        if data is None or str(data).strip().lower() == 'all':
            return None
        try:
            value = int(str(data).strip())
        except ValueError:
            self.fail('invalid', input=data)
        if value < 1:
            self.fail('invalid', input=data)
        return value

    def to_representation(self, value):
        return 'all' if value is None else value


class PlanSerializer(serializers.Serializer):
    protocol = serializers.CharField(max_length=64)
    step = serializers.IntegerField(min_value=1)
    old_classes = CommaListField()
    new_classes = CommaListField()
    overlapped = serializers.BooleanField(default=False)
    train_source = serializers.ChoiceField(choices=TrainSource.choices,
                                           default=TrainSource.WEB)
    rehearsal = serializers.ChoiceField(choices=RehearsalMode.choices,
                                        default=RehearsalMode.WEB)
    seed = serializers.IntegerField(min_value=0, default=0)

    per_class_crawl = serializers.IntegerField(min_value=1, default=10000)
    per_class_keep = serializers.IntegerField(min_value=1, default=500)
    per_caption = serializers.IntegerField(min_value=1, default=20)
    rehearsal_per_class = serializers.IntegerField(min_value=1, default=100)
    threshold = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.6)
    noun_count = NounCountField(default=2)

    use_discriminator = serializers.BooleanField(default=True)
    labeling = serializers.ChoiceField(choices=Labeling.choices,
                                       default=Labeling.CAPTION)
    rehearsal_query = serializers.ChoiceField(choices=RehearsalQuery.choices,
                                              default=RehearsalQuery.CAPTION)
    use_filter = serializers.BooleanField(default=True)

    def validate_new_classes(self, value):
        if not value:
            raise serializers.ValidationError('A step needs at least one new class.')
        return value

    def validate(self, attrs):
        overlap = set(attrs['old_classes']) & set(attrs['new_classes'])
        if overlap:
            raise serializers.ValidationError(
                f'Classes {sorted(overlap)} are both old and new.'
            )
        if attrs['per_class_keep'] > attrs['per_class_crawl']:
            raise serializers.ValidationError(
                'per_class_keep cannot exceed per_class_crawl.'
            )
        if attrs['rehearsal'] == RehearsalMode.WEB and not attrs['old_classes']:
            raise serializers.ValidationError('Web rehearsal needs old classes.')
        return attrs


class TrainingRowSerializer(serializers.Serializer):
    id = serializers.CharField()
    file = serializers.CharField()
    queried_with = serializers.CharField(allow_blank=True)
    classes = serializers.ListField(child=serializers.CharField())
    label = serializers.ListField(child=serializers.IntegerField(min_value=0, max_value=1))
    score = serializers.FloatField()
    caption = serializers.CharField(allow_null=True, allow_blank=True, required=False,
                                    trim_whitespace=False)


class RehearsalRowSerializer(serializers.Serializer):
    id = serializers.CharField()
    file = serializers.CharField()
    queried_with = serializers.CharField(allow_blank=True, trim_whitespace=False)
    classes = serializers.ListField(child=serializers.CharField())
    caption = serializers.CharField(allow_null=True, allow_blank=True, required=False,
                                    trim_whitespace=False)
    similarity = serializers.FloatField(allow_null=True, required=False)


class CaptionPairSerializer(serializers.Serializer):
    q1 = serializers.CharField(allow_blank=True, trim_whitespace=False)
    q2 = serializers.CharField(allow_blank=True, trim_whitespace=False)


class FunnelSerializer(serializers.Serializer):
    crawled = serializers.IntegerField(min_value=0)
    gated = serializers.IntegerField(min_value=0)
    labeled = serializers.IntegerField(min_value=0)
    kept = serializers.IntegerField(min_value=0)
    failed = serializers.IntegerField(min_value=0)

    def validate(self, attrs):
        if not attrs['crawled'] >= attrs['gated'] >= attrs['labeled'] >= attrs['kept']:
            raise serializers.ValidationError('Funnel counts must not grow.')
        return attrs


class RehearsalFunnelSerializer(serializers.Serializer):
    retrieved = serializers.IntegerField(min_value=0)
    captioned = serializers.IntegerField(min_value=0)
    filtered = serializers.IntegerField(min_value=0)
    kept = serializers.IntegerField(min_value=0)
    failed_queries = serializers.IntegerField(min_value=0)

    def validate(self, attrs):
        if not (attrs['retrieved'] >= attrs['captioned']
                >= attrs['filtered'] >= attrs['kept']):
            raise serializers.ValidationError('Funnel counts must not grow.')
        return attrs


class TrainingSummarySerializer(serializers.Serializer):
    train_images = serializers.IntegerField(min_value=0)
    rehearsal_images = serializers.IntegerField(min_value=0)
    epochs = serializers.IntegerField(min_value=0)
    warmup_epochs = serializers.IntegerField(min_value=0)
    learning_rate = serializers.FloatField(min_value=0.0)
    weights = serializers.DictField(child=serializers.FloatField(min_value=0.0))
    losses = serializers.ListField(child=serializers.FloatField(), min_length=1)
    final_parts = serializers.DictField(child=serializers.FloatField())

    def validate(self, attrs):
        if len(attrs['losses']) != attrs['epochs'] + 1:
            raise serializers.ValidationError('Expected one loss per epoch plus the initial one.')
        return attrs


class StepReportSerializer(serializers.Serializer):
    """The report.json schema"""
    protocol = serializers.CharField()
    step = serializers.IntegerField(min_value=1)
    config = serializers.DictField()
    acquisition = serializers.DictField(child=FunnelSerializer(), allow_null=True,
                                        required=False)
    rehearsal = RehearsalFunnelSerializer(allow_null=True, required=False)
    training = TrainingSummarySerializer(allow_null=True, required=False)
    wall_time = serializers.DictField(child=serializers.FloatField(min_value=0.0),
                                      allow_null=True, required=False)
