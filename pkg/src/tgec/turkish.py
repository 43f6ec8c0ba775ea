"""Turkish-aware casing helpers and alphabet constants.

Python's built-in str.lower()/str.upper() mishandle the dotted/dotless i
pair (İ/i vs I/ı): "İ".lower() yields "i" plus a combining dot. Every
case operation on Turkish text in this package goes through this module.
"""

# 29-letter Turkish alphabet, lowercase, in alphabet order.
ALPHABET = "abcçdefgğhıijklmnoöprsştuüvyz"

# Apostrophe joins clitic suffixes to proper nouns (Matrix'ten) and is
# treated as a word-internal character by the tokenizer.
APOSTROPHES = "'’"


def lower(text: str) -> str:
    """Lowercase with Turkish I-rules: I -> ı, İ -> i."""
    return text.replace("İ", "i").replace("I", "ı").lower()


def upper(text: str) -> str:
    """Uppercase with Turkish I-rules: i -> İ, ı -> I."""
    return text.replace("i", "İ").replace("ı", "I").upper()


def fold(text: str) -> str:
    """Case-fold a token for use as a dictionary or index key."""
    return lower(text)


def capitalize(word: str) -> str:
    """Uppercase only the first character, Turkish-aware ("iyi" -> "İyi")."""
    if not word:
        return word
    return upper(word[0]) + word[1:]
