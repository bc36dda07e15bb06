from django.urls import path
from .views import WordOperationView, SuiteRunListView, SuiteRunDetailView


urlpatterns = [

    path('words/<str:operation>/', WordOperationView.as_view(), name='word-operation'),

    path('runs/', SuiteRunListView.as_view(), name='run-list'),

    path('runs/<int:pk>/', SuiteRunDetailView.as_view(), name='run-detail'),
]
