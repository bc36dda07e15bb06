from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView
from rest_framework.generics import RetrieveAPIView
from drf_yasg import openapi
from drf_yasg.utils import swagger_auto_schema
import logging

from .exceptions import GraphStarError
from .graphwords import WORD_OPERATIONS, run_operation
from .models import SuiteRun
from .serializers import SuiteRunDetailSerializer, SuiteRunSerializer, WordRequestSerializer

logger = logging.getLogger(__name__)


class WordOperationView(APIView):
    authentication_classes = []

    @swagger_auto_schema(request_body=WordRequestSerializer)
    def post(self, request, operation):
        """
        Run one word operation (reduce, nf, stdform, closure, nclen, truncations)
        on the posted graph and word.
        """
        if operation not in WORD_OPERATIONS:
            return Response({"error": f"Unknown operation '{operation}'. Use one of {', '.join(WORD_OPERATIONS)}."},
                            status=status.HTTP_404_NOT_FOUND)
        serializer = WordRequestSerializer(data=request.data, context={'operation': operation})
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data
        try:
            result = run_operation(data['graph'], operation, data['word'], data['words'], data.get('v0'))
        except GraphStarError as exc:
            logger.info(f"word operation {operation} rejected: {exc}")
            return Response({"error": str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(result, status=status.HTTP_200_OK)


class SuiteRunListView(APIView):
    authentication_classes = []

    @swagger_auto_schema(manual_parameters=[
        openapi.Parameter('suite', openapi.IN_QUERY, type=openapi.TYPE_STRING, description="Filter by suite name, e.g. 'verify ucp'."),
        openapi.Parameter('limit', openapi.IN_QUERY, type=openapi.TYPE_INTEGER, description="Maximum number of runs."),
    ])
    def get(self, request):
        runs = SuiteRun.objects.all()
        suite = request.query_params.get('suite')
        if suite:
            runs = runs.filter(suite=suite)
        limit = request.query_params.get('limit')
        if limit is not None:
            try:
                runs = runs[:max(int(limit), 0)]
            except ValueError:
                return Response({"limit": "Must be an integer."}, status=status.HTTP_400_BAD_REQUEST)
        return Response(SuiteRunSerializer(runs, many=True).data, status=status.HTTP_200_OK)


class SuiteRunDetailView(RetrieveAPIView):
    authentication_classes = []
    queryset = SuiteRun.objects.all()
    serializer_class = SuiteRunDetailSerializer
