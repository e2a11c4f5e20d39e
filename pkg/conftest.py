import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "spectralab.settings")
django.setup()
