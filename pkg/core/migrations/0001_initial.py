# Generated by Django 5.1.4 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SuiteRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('suite', models.CharField(db_index=True, max_length=64)),
                ('seed', models.BigIntegerField()),
                ('trials', models.PositiveIntegerField()),
                ('passes', models.PositiveIntegerField(default=0)),
                ('failures', models.PositiveIntegerField(default=0)),
                ('skipped', models.PositiveIntegerField(default=0)),
                ('worst_residual', models.FloatField(blank=True, null=True)),
                ('passed', models.BooleanField(default=False)),
                ('schema_version', models.PositiveSmallIntegerField(default=1)),
                ('report', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
