from django.core.exceptions import ValidationError
from django.db import models
import math


class SuiteRun(models.Model):
    """One recorded suite report. Rows are append-only: a stored run is never updated."""

    suite = models.CharField(max_length=64, db_index=True)
    seed = models.BigIntegerField()
    trials = models.PositiveIntegerField()
    passes = models.PositiveIntegerField(default=0)
    failures = models.PositiveIntegerField(default=0)
    skipped = models.PositiveIntegerField(default=0)
    worst_residual = models.FloatField(null=True, blank=True)
    passed = models.BooleanField(default=False)
    schema_version = models.PositiveSmallIntegerField(default=1)
    report = models.JSONField()
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    @classmethod
    def from_report(cls, report):
        worst = report.get('worst_residual')
        return cls(
            suite=report['suite'],
            seed=report['seed'],
            trials=report['trials'],
            passes=report['passes'],
            failures=report['failures'],
            skipped=report['skipped'],
            worst_residual=worst if isinstance(worst, (int, float)) and math.isfinite(worst) else None,
            passed=report['passed'],
            schema_version=report['schema_version'],
            report=report,
        )

    def clean(self):
        if self.passes + self.failures + self.skipped != self.trials:
            raise ValidationError(
                f"{self.passes} passes, {self.failures} failures and {self.skipped} skipped do not add up to {self.trials} trials")
        if self.report.get('suite') != self.suite or self.report.get('seed') != self.seed:
            raise ValidationError("report does not belong to this run")
        if self.passed and self.failures:
            raise ValidationError("a run with failures cannot pass")

    def save(self, *args, **kwargs):
        if self.pk is not None and SuiteRun.objects.filter(pk=self.pk).exists():
            raise ValidationError("Suite runs are append-only and cannot be updated.")
        self.full_clean()
        super().save(*args, **kwargs)

    def __str__(self):
        verdict = 'pass' if self.passed else 'FAIL'
        return f"{self.suite} seed={self.seed} {self.passes}/{self.trials} {verdict}"
