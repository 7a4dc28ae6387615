import re


WORD_SPLIT = re.compile(r'[^0-9a-z]+')


def split_words(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter or digit"""
    return [t for t in WORD_SPLIT.split(text.lower()) if t]


def normalize_form(form: str) -> str:
    return ' '.join(split_words(form))
