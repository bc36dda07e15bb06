from django.contrib import admin
from .models import SuiteRun


class SuiteRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'suite', 'seed', 'trials', 'passes', 'failures', 'skipped', 'worst_residual', 'passed', 'created_at')
    list_filter = ('suite', 'passed')
    search_fields = ('suite',)
    ordering = ('-created_at',)
    readonly_fields = [f.name for f in SuiteRun._meta.fields]

    def has_change_permission(self, request, obj=None):
        # runs are append-only
        return False


admin.site.register(SuiteRun, SuiteRunAdmin)
