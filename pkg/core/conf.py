"""Access to the GRAPHSTAR settings dict with library defaults."""

from django.conf import settings

DEFAULTS = {
    'PSD_TOL': 1e-8,
    'EQ_TOL': 1e-9,
    'HERMITIAN_TOL': 1e-10,
    'CHOI_TOL': 1e-9,
    'COMMUTE_TOL': 1e-10,
    'QUOTIENT_CUTOFF': 1e-10,
    'COMPRESSION_TOL': 1e-8,
    'LX_SLACK': 1e-7,
    'JACOBI_TOL': 1e-13,
    'JACOBI_MAX_SWEEPS': 100,
    'LAURENT_BAND': 6,
    'FOCK_CUTOFF': 4,
    'FOCK_MAX_DIM': 5000,
    'CLASS_CAP': 100000,
    'BALL_CAP': 20000,
    'THREADS': 1,
    'ARTIFACT_DIR': 'artifacts',
    'REPORT_SCHEMA_VERSION': 1,
}


def setting(name):
    """Look up a GRAPHSTAR setting, falling back to the defaults when Django is not configured."""
    if settings.configured:
        return getattr(settings, 'GRAPHSTAR', {}).get(name, DEFAULTS[name])
    return DEFAULTS[name]
