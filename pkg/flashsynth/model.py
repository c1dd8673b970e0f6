"""a trainable synthesizer: grammar, parameters, example encoder and generator network"""
import logging

from flashsynth import checkpoint, conf, utils
from flashsynth.encoders import LSTM_SUM_CC, IOEncoder
from flashsynth.exceptions import CheckpointError, ConfigError
from flashsynth.grammar import build_grammar
from flashsynth.io2seq import Io2Seq
from flashsynth.params import ParamStore
from flashsynth.r3nn import R3NN


logger = logging.getLogger(__name__)

R3NN_ENGINE = 'r3nn'
IO2SEQ_ENGINE = 'io2seq'
ENGINES = (R3NN_ENGINE, IO2SEQ_ENGINE)


class Model(object):

    def __init__(self, synth_config, engine=R3NN_ENGINE, seed=None):
        if engine not in ENGINES:
            raise ConfigError('unknown engine %s' % engine)
        self.synth_config = dict(synth_config)
        self.engine = engine
        self.seed = synth_config.get('seed', 0) if seed is None else seed
        self.grammar = build_grammar(synth_config)
        self.store = ParamStore(self.seed)
        if engine == IO2SEQ_ENGINE:
            # the sequence baseline always reads the LSTM-sum correlation encoding
            self.synth_config['encoder'] = LSTM_SUM_CC
            self.encoder = IOEncoder(self.store, self.synth_config)
            self.network = Io2Seq(
                self.store, self.grammar, self.encoder.output_dim,
                synth_config.get('io2seq_hidden', 64), synth_config.get('io2seq_layers', 2))
        else:
            self.encoder = IOEncoder(self.store, synth_config)
            self.network = R3NN(
                self.store, self.grammar, synth_config.get('model_dim', 64),
                self.encoder.output_dim, synth_config.get('rule_net_depth', 1),
                synth_config.get('conditioning') or ('pre',),
                synth_config.get('cond_net', 'feedforward'),
                synth_config.get('leaf_lstm', False))
        logger.debug('%s model with %s parameters', engine, self.store.num_parameters())

    def encode(self, params, task):
        return self.encoder.encode_io_set(params, task.examples)

    def manifest(self, provenance=False):
        fields = {
            'engine': self.engine,
            'seed': self.seed,
            'hyperparameters': self.synth_config,
            'config_hash': conf.config_hash(self.synth_config),
            'grammar_hash': self.grammar.grammar_hash(),
            'encoder_fields': self.encoder.fields(),
            'generator': self.synth_config.get('generator', 'flashsynth'),
        }
        if provenance:
            fields['commit'] = utils.get_last_commit()
        return fields

    def save(self, path, provenance=False):
        return checkpoint.save_checkpoint(path, self.store, self.manifest(provenance))


def load_model(path, synth_config=None):
    """rebuild the model a checkpoint was saved from and load its parameters

    When synth_config is given its grammar and encoder fields must match the
    checkpoint.
    """
    manifest, arrays = checkpoint.read_checkpoint(path)
    saved_config = manifest.get('hyperparameters')
    if not isinstance(saved_config, dict):
        raise CheckpointError('checkpoint manifest has no hyperparameters')
    model = Model(saved_config, manifest.get('engine', R3NN_ENGINE), manifest.get('seed'))
    checkpoint.check_manifest(manifest, model.grammar.grammar_hash(), saved_config)
    if synth_config is not None:
        expected = dict(synth_config)
        if model.engine == IO2SEQ_ENGINE:
            expected['encoder'] = LSTM_SUM_CC
        checkpoint.check_manifest(manifest, build_grammar(expected).grammar_hash(), expected)
    checkpoint.load_into(model.store, arrays)
    return model
