import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'heavytail_lab.settings.dev')
django.setup()
