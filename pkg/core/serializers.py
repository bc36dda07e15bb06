from rest_framework import serializers
import numpy as np

from .exceptions import GraphStarError
from .graphwords import SimplicialGraph, check_word
from .models import SuiteRun
from .staralg import GraphProduct, MatrixAlgebra, StinespringMap, ThetaSpec


def encode_array(a):
    a = np.asarray(a, dtype=np.complex128)
    return {'shape': list(a.shape), 're': a.real.tolist(), 'im': a.imag.tolist()}


def decode_array(doc):
    re = np.asarray(doc['re'], dtype=np.float64)
    im = np.asarray(doc['im'], dtype=np.float64)
    if re.shape != im.shape or list(re.shape) != list(doc.get('shape', re.shape)):
        raise ValueError("real and imaginary parts disagree in shape")
    return re + 1j * im


class ComplexArrayField(serializers.Field):
    """A complex array as {"shape", "re", "im"} with nested real lists."""

    def to_representation(self, value):
        return encode_array(value)

    def to_internal_value(self, data):
        if not isinstance(data, dict) or 're' not in data or 'im' not in data:
            raise serializers.ValidationError("expected an object with 're' and 'im' arrays")
        try:
            a = decode_array(data)
        except (TypeError, ValueError) as exc:
            raise serializers.ValidationError(f"malformed complex array: {exc}")
        if not np.all(np.isfinite(a)):
            raise serializers.ValidationError("array has non-finite entries")
        return a


class GraphSerializer(serializers.Serializer):
    """A graph given either as vertex count plus edge list or in the text format."""

    n = serializers.IntegerField(min_value=1, max_value=64, required=False)
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2),
        required=False, default=list,
    )
    text = serializers.CharField(required=False, trim_whitespace=False)

    def validate(self, attrs):
        try:
            if 'text' in attrs:
                return SimplicialGraph.parse(attrs['text'])
            if 'n' not in attrs:
                raise serializers.ValidationError({"n": "Either 'n' with 'edges' or 'text' is required."})
            return SimplicialGraph.from_edges(attrs['n'], [tuple(e) for e in attrs['edges']])
        except GraphStarError as exc:
            raise serializers.ValidationError({"edges": str(exc)})

    def to_representation(self, instance):
        return {'n': instance.n_vertices, 'edges': [list(e) for e in sorted(instance.edges)]}


class VertexMapSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=['matrix'])
    d = serializers.IntegerField(min_value=1, max_value=16)
    density = ComplexArrayField()
    isometry = ComplexArrayField()
    ancilla = serializers.IntegerField(min_value=1)
    leg = serializers.IntegerField(min_value=0, default=0)


class ThetaSpecSerializer(serializers.Serializer):
    """
    JSON document of a ThetaSpec over matrix algebras with Stinespring vertex
    maps θ_v(a) = W_v*(a ⊗ I)W_v acting on tensor leg ``leg`` of the target.
    Validation rebuilds the ThetaSpec and checks unitality, complete positivity and
    edge commutation.
    """

    graph = GraphSerializer()
    target_dim = serializers.IntegerField(min_value=1)
    legs = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_null=True)
    vertices = VertexMapSerializer(many=True)

    def validate(self, attrs):
        g = attrs['graph']
        vertices = attrs['vertices']
        if len(vertices) != g.n_vertices:
            raise serializers.ValidationError({"vertices": f"{len(vertices)} vertex maps for {g.n_vertices} vertices"})
        legs = tuple(attrs['legs']) if attrs.get('legs') else (None,)
        try:
            algebras, maps = [], []
            for doc in vertices:
                algebras.append(MatrixAlgebra(doc['d'], doc['density']))
                maps.append(StinespringMap(doc['isometry'], doc['d'], doc['ancilla'], doc['leg'], legs))
            spec = ThetaSpec(GraphProduct(g, tuple(algebras)), tuple(maps), attrs['target_dim'],
                             legs=None if legs == (None,) else legs)
            probe = spec.theta(0, algebras[0].unit())
            if probe.shape != (spec.target_dim, spec.target_dim):
                raise serializers.ValidationError({"target_dim": f"vertex maps produce {probe.shape} matrices"})
            spec.validate()
        except (GraphStarError, ValueError) as exc:
            raise serializers.ValidationError({"vertices": str(exc)})
        return spec

    def to_representation(self, instance):
        return {
            'graph': GraphSerializer(instance.graph).data,
            'target_dim': instance.target_dim,
            'legs': list(instance.legs) if instance.legs else None,
            'vertices': [
                {
                    'kind': 'matrix', 'd': A.d, 'density': encode_array(A.density),
                    'isometry': encode_array(f.isometry), 'ancilla': f.ancilla, 'leg': f.leg,
                }
                for A, f in zip(instance.product.algebras, instance.maps)
            ],
        }


class WordRequestSerializer(serializers.Serializer):
    graph = GraphSerializer()
    word = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False, default=list)
    words = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)), required=False, default=list,
    )
    v0 = serializers.IntegerField(min_value=0, required=False)

    def validate(self, attrs):
        g = attrs['graph']
        operation = self.context.get('operation')
        try:
            attrs['word'] = check_word(g, attrs['word'])
            attrs['words'] = [check_word(g, w) for w in attrs['words']]
        except GraphStarError as exc:
            raise serializers.ValidationError({"word": str(exc)})
        if operation in ('stdform', 'nclen'):
            if 'v0' not in attrs:
                raise serializers.ValidationError({"v0": f"'{operation}' needs a vertex v0."})
            if attrs['v0'] >= g.n_vertices:
                raise serializers.ValidationError({"v0": f"vertex {attrs['v0']} is not in the graph."})
        if operation == 'closure' and not attrs['words'] and not attrs['word']:
            raise serializers.ValidationError({"words": "'closure' needs at least one word."})
        return attrs


class SuiteRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = SuiteRun
        fields = ['id', 'suite', 'seed', 'trials', 'passes', 'failures', 'skipped', 'worst_residual',
                  'passed', 'schema_version', 'created_at']
        read_only_fields = fields


class SuiteRunDetailSerializer(SuiteRunSerializer):
    class Meta(SuiteRunSerializer.Meta):
        fields = SuiteRunSerializer.Meta.fields + ['report']
        read_only_fields = fields
