from .base import *

DEBUG = False

# Batch hosts must say where artifacts go and sign nothing with the dev key.
SECRET_KEY = config('SECRET_KEY')
HTSTAB_OUTPUT_DIR = config('HTSTAB_OUTPUT_DIR')
HTSTAB_PARALLELISM = config('HTSTAB_PARALLELISM', default=4, cast=int)
