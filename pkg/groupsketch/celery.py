"""
Celery configuration for the groupsketch project.

Monte-Carlo runs are dispatched as tasks; with CELERY_TASK_ALWAYS_EAGER
(the default) they execute in the calling process.
"""
import os

from celery import Celery

# Set the default Django settings module
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'groupsketch.settings')

app = Celery('groupsketch')

# Load config from Django settings with 'CELERY_' prefix
app.config_from_object('django.conf:settings', namespace='CELERY')

# Auto-discover tasks from all registered Django app configs
app.autodiscover_tasks()
