import json
import logging
from pathlib import Path

from django.db.models.signals import post_save
from django.dispatch import receiver

from .conf import setting
from .models import SuiteRun

logger = logging.getLogger(__name__)


@receiver(post_save, sender=SuiteRun)
def write_counter_instances(sender, instance, created, **kwargs):
    """Write the counter-instances of a newly recorded run to the artifact directory."""
    if not created:
        return
    artifacts = instance.report.get('artifacts') or []
    if instance.passed:
        logger.info(f"Suite run {instance.pk} recorded: {instance}")
    else:
        logger.warning(f"Suite run {instance.pk} recorded with {instance.failures} failure(s): {instance}")
    if not artifacts:
        return
    directory = Path(setting('ARTIFACT_DIR'))
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{instance.suite.replace(' ', '-')}-seed{instance.seed}-run{instance.pk}.json"
    path.write_text(json.dumps({'run': instance.pk, 'suite': instance.suite, 'seed': instance.seed,
                                'counter_instances': artifacts}, indent=2, sort_keys=True))
    logger.info(f"Wrote {len(artifacts)} counter-instance(s) to {path}")
