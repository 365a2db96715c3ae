from django.urls import path, include
from django.views.generic import RedirectView

from rinehart.views import run_command, paper_suite, api_root

# API URL patterns
api_urlpatterns = [
    path('', api_root, name='api-root'),

    # Any CLI command against an inline session
    path('run/', run_command, name='run-command'),

    # Verification suite
    path('paper-suite/', paper_suite, name='paper-suite'),
]

urlpatterns = [
    # Redirect root to API base
    path('', RedirectView.as_view(url='/api/', permanent=False)),

    # API URLs
    path('api/', include(api_urlpatterns)),
]
