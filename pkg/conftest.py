"""Pytest wiring: configure Django and create the test database."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'graphstar.settings')
django.setup()


def pytest_sessionstart(session):
    from django.test.utils import setup_test_environment, get_runner
    from django.conf import settings

    setup_test_environment()
    runner = get_runner(settings)(verbosity=0, interactive=False)
    session.config._django_old_config = runner.setup_databases()
    session.config._django_runner = runner


def pytest_sessionfinish(session, exitstatus):
    from django.test.utils import teardown_test_environment

    runner = getattr(session.config, '_django_runner', None)
    if runner is not None:
        runner.teardown_databases(session.config._django_old_config)
        teardown_test_environment()
