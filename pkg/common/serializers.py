from rest_framework import serializers


class Serializer(serializers.Serializer):
    """
    Define the project base serializer.

    The `create` and `update` methods of DRF serializers are
    overridden to exclude business logic, which lives in the
    services of each app. Serializers only validate command input
    and shape artifact output.
    """

    def create(self, validated_data):
        """Invalidate serializer instance creation."""
        raise NotImplementedError()

    def update(self, instance, validated_data):
        """Invalidate serializer instance update."""
        raise NotImplementedError()

    def check_data(self) -> None:
        """Check data validity and raise an exception if not."""
        self.is_valid(raise_exception=True)


class FloatListField(serializers.ListField):
    """A list of floats."""

    child = serializers.FloatField()


class FloatMatrixField(serializers.ListField):
    """A list of float rows."""

    child = FloatListField()
