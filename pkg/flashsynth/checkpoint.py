"""checkpoint container: magic header, JSON manifest, little-endian float64 blobs"""
import json
import struct

import numpy as np

from flashsynth.exceptions import CheckpointError


MAGIC = b'NSPS1'
FORMAT_VERSION = 1
DTYPE = '<f8'

# manifest fields compared when a checkpoint is loaded for a configuration
ENCODER_FIELDS = ('encoder', 'max_length', 'hidden_size', 'embedding_size',
                  'encoder_layers', 'n_examples')


def save_checkpoint(path, store, manifest_fields=None):
    """write every parameter of store, in creation order, with a manifest"""
    names = store.names()
    manifest = dict(manifest_fields or {})
    manifest['version'] = FORMAT_VERSION
    manifest['dtype'] = DTYPE
    manifest['params'] = [
        {'name': name, 'shape': list(store.params[name].shape)} for name in names]
    manifest_bytes = json.dumps(manifest, sort_keys=True).encode('utf-8')
    with open(path, 'wb') as open_file:
        open_file.write(MAGIC)
        open_file.write(struct.pack('<Q', len(manifest_bytes)))
        open_file.write(manifest_bytes)
        for name in names:
            open_file.write(np.ascontiguousarray(store.params[name], dtype=DTYPE).tobytes())
    return manifest


def read_checkpoint(path):
    """(manifest, {name: array}) from a checkpoint file"""
    with open(path, 'rb') as open_file:
        data = open_file.read()
    if not data.startswith(MAGIC):
        raise CheckpointError('%s is not a checkpoint' % path)
    offset = len(MAGIC)
    if len(data) < offset + 8:
        raise CheckpointError('truncated checkpoint header')
    (manifest_length,) = struct.unpack('<Q', data[offset:offset + 8])
    offset += 8
    try:
        manifest = json.loads(data[offset:offset + manifest_length].decode('utf-8'))
    except ValueError as exception:
        raise CheckpointError('bad manifest: %s' % exception)
    offset += manifest_length
    if manifest.get('version') != FORMAT_VERSION or manifest.get('dtype') != DTYPE:
        raise CheckpointError('unsupported checkpoint version or dtype')
    arrays = {}
    for entry in manifest.get('params', []):
        shape = tuple(entry['shape'])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 8 * count
        if end > len(data):
            raise CheckpointError('truncated blob for %s' % entry['name'])
        arrays[entry['name']] = np.frombuffer(
            data[offset:end], dtype=DTYPE).astype(np.float64).reshape(shape)
        offset = end
    if offset != len(data):
        raise CheckpointError('trailing bytes after the last blob')
    return manifest, arrays


def load_into(store, arrays):
    """copy arrays into an identically shaped store"""
    if set(arrays) != set(store.names()):
        missing = sorted(set(store.names()) - set(arrays))
        extra = sorted(set(arrays) - set(store.names()))
        raise CheckpointError('parameter names differ, missing %s, unexpected %s' % (
            missing, extra))
    for name, value in arrays.items():
        if value.shape != store.params[name].shape:
            raise CheckpointError('parameter %s has shape %s, expected %s' % (
                name, value.shape, store.params[name].shape))
        store.set(name, value)


def check_manifest(manifest, grammar_hash, synth_config):
    """raise CheckpointError unless grammar and encoder fields match"""
    if manifest.get('grammar_hash') != grammar_hash:
        raise CheckpointError('checkpoint grammar %s does not match grammar %s' % (
            manifest.get('grammar_hash'), grammar_hash))
    encoder = manifest.get('encoder_fields', {})
    for field in ENCODER_FIELDS:
        if field in encoder and field in synth_config and encoder[field] != synth_config[field]:
            raise CheckpointError('checkpoint %s is %s, configuration has %s' % (
                field, encoder[field], synth_config[field]))
