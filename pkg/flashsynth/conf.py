import configparser as configparser
import hashlib
import json

from flashsynth.exceptions import ConfigError

CONFIG_FILE = 'flashsynth.cfg'

ENCODER_VARIANTS = ('LSTM', 'CC', 'DiffusedCC', 'LSTMSumCC', 'AugmentedDiffusedCC')

CONDITIONING_LOCATIONS = ('pre', 'root', 'post')

COND_NETS = ('feedforward', 'lstm')


def load_config(config_file=None):
    if not config_file:
        config_file = CONFIG_FILE
    config = configparser.ConfigParser(interpolation=None)
    config.read(config_file)
    return config


def raw_config(config_section, config_file=None):
    """try to load the config section"""
    if not config_file:
        config_file = CONFIG_FILE
    config = load_config(config_file)
    if config_section and config.has_section(config_section):
        return config[config_section]
    # default
    return config['DEFAULT']


def parse_raw_config(raw_config_object):
    """parse the raw config to something good"""
    synth_config = {}
    boolean_values = []
    int_values = []
    float_values = []
    list_values = []

    boolean_values.append("leaf_lstm")
    int_values.append("max_length")
    int_values.append("max_concat")
    int_values.append("max_const_pos")
    int_values.append("max_match_index")
    int_values.append("seed")
    int_values.append("max_size")
    int_values.append("max_program_size")
    int_values.append("n_examples")
    int_values.append("retry_cap")
    int_values.append("hidden_size")
    int_values.append("embedding_size")
    int_values.append("encoder_layers")
    int_values.append("model_dim")
    int_values.append("rule_net_depth")
    int_values.append("batch_size")
    int_values.append("epochs")
    int_values.append("accuracy_every")
    int_values.append("max_expansions")
    int_values.append("time_budget_ms")
    int_values.append("io2seq_hidden")
    int_values.append("io2seq_layers")
    int_values.append("max_tokens")
    float_values.append("learning_rate")
    float_values.append("adam_beta1")
    float_values.append("adam_beta2")
    float_values.append("adam_eps")
    list_values.append("constant_strings")
    list_values.append("split_ratios")
    list_values.append("conditioning")
    list_values.append("samples")

    for value_name in raw_config_object:
        try:
            if value_name in boolean_values:
                synth_config[value_name] = raw_config_object.getboolean(value_name)
            elif value_name in int_values:
                synth_config[value_name] = raw_config_object.getint(value_name)
            elif value_name in float_values:
                synth_config[value_name] = raw_config_object.getfloat(value_name)
            elif value_name in list_values:
                synth_config[value_name] = json.loads(raw_config_object.get(value_name))
            else:
                # default
                synth_config[value_name] = raw_config_object.get(value_name)
        except ValueError as exception:
            raise ConfigError('bad value for %s: %s' % (value_name, exception))
    check_config(synth_config)
    return synth_config


def build_config(config_section=None, config_file=None, **overrides):
    """parsed config for a section with keyword overrides applied on top"""
    synth_config = parse_raw_config(raw_config(config_section, config_file))
    synth_config.update(overrides)
    check_config(synth_config)
    return synth_config


def check_config(synth_config):
    """raise ConfigError for values the library cannot work with"""
    for value_name in ['max_length', 'max_concat', 'hidden_size', 'embedding_size',
                       'encoder_layers', 'model_dim', 'rule_net_depth', 'batch_size',
                       'n_examples', 'retry_cap', 'max_match_index']:
        if value_name in synth_config and synth_config[value_name] < 1:
            raise ConfigError('%s must be positive' % value_name)
    if synth_config.get('encoder') and synth_config['encoder'] not in ENCODER_VARIANTS:
        raise ConfigError('unknown encoder %s' % synth_config['encoder'])
    for location in synth_config.get('conditioning') or []:
        if location not in CONDITIONING_LOCATIONS:
            raise ConfigError('unknown conditioning location %s' % location)
    if synth_config.get('cond_net') and synth_config['cond_net'] not in COND_NETS:
        raise ConfigError('unknown cond_net %s' % synth_config['cond_net'])
    if synth_config.get('split_ratios'):
        ratios = synth_config['split_ratios']
        if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9:
            raise ConfigError('split_ratios must be three values summing to 1')
    if synth_config.get('leaf_lstm') and synth_config.get('model_dim', 2) % 2:
        raise ConfigError('leaf_lstm needs an even model_dim')


def config_hash(synth_config):
    """stable hash of a parsed config, used in dataset and checkpoint provenance"""
    canonical = json.dumps(synth_config, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
