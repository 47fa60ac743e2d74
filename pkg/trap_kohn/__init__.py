"""Неоднородная подвижность фермионов в гармонической ловушке (бозонизация, теорема Кона)"""

__version__ = "0.1.0"
