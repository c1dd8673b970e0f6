import hashlib
import json
import random
import string

import git
import numpy as np

from flashsynth.exceptions import ConfigError


def printable_chars():
    """printable ASCII from space to tilde, in code point order"""
    return ''.join(chr(code) for code in range(32, 127))


def named_chars(value):
    """resolve a config character set value to a string of characters"""
    if value is None or value == '' or value == 'none':
        return ''
    if value == 'printable':
        return printable_chars()
    if value == 'letters':
        return string.ascii_letters
    if value.startswith('"'):
        try:
            return json.loads(value)
        except ValueError:
            raise ConfigError('bad character set %s' % value)
    raise ConfigError('unknown character set %s' % value)


def charset(synth_config):
    return named_chars(synth_config.get('charset', 'printable'))


def constant_universe(synth_config):
    """ordered, duplicate free list of constant strings"""
    universe = []
    for constant in (list(named_chars(synth_config.get('constant_chars')))
                     + list(synth_config.get('constant_strings') or [])):
        if constant and constant not in universe:
            universe.append(constant)
    return universe


def seed_int(*keys):
    """derive a 64 bit seed from a tuple of ints and strings"""
    digest = hashlib.sha256(json.dumps(list(keys)).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


def seeded_random(*keys):
    """python Random for exact integer weighted choices"""
    return random.Random(seed_int(*keys))


def seeded_rng(*keys):
    """numpy Generator for a disjoint seed stream"""
    return np.random.default_rng(seed_int(*keys))


def text_hash(text):
    return bytes_hash(text.encode('utf-8'))


def bytes_hash(data):
    return hashlib.sha256(data).hexdigest()


def get_last_commit(path='.'):
    """hexsha of the last commit of the repository containing path"""
    try:
        repo = git.Repo(path, search_parent_directories=True)
        return repo.head.commit.hexsha
    except (git.InvalidGitRepositoryError, git.NoSuchPathError, ValueError):
        return 'unknown'
