# from .constants import *
