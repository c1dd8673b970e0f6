import os
from flashsynth.conf import raw_config, parse_raw_config


TEST_BASE_PATH = os.path.dirname(os.path.abspath(__file__)) + os.sep
TEST_DATA_PATH = TEST_BASE_PATH + "test_data" + os.sep
BENCHMARKS_PATH = os.path.dirname(TEST_BASE_PATH.rstrip(os.sep)) + os.sep + "benchmarks" + os.sep
CONFIG_FILE = os.path.dirname(TEST_BASE_PATH.rstrip(os.sep)) + os.sep + "flashsynth.cfg"


def read_file_content(file_name):
    with open(file_name, 'rb') as open_file:
        return open_file.read()


def create_config(config_section='tiny', **overrides):
    """utility to create the parsed config of a profile section"""
    raw_config_object = raw_config(config_section, CONFIG_FILE)
    synth_config = parse_raw_config(raw_config_object)
    synth_config.update(overrides)
    return synth_config
