import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'floquetea.settings')
django.setup()
