"""JSON Lines task files and program-identity splits"""
import json
import logging

from flashsynth import utils
from flashsynth.datagen import Example, Task
from flashsynth.exceptions import FormatError, ProgramSyntaxError
from flashsynth.syntax import parse_program, serialize_program


logger = logging.getLogger(__name__)

SPLIT_NAMES = ('train', 'validation', 'test')

# resolution of the program hash buckets used for splitting
SPLIT_BUCKETS = 1000000


def task_to_record(task):
    record = {
        'program': serialize_program(task.program) if task.program is not None else None,
        'examples': [{'in': example.input, 'out': example.output} for example in task.examples],
    }
    if task.name:
        record['name'] = task.name
    return record


def examples_from_records(records, line_number=None):
    if not isinstance(records, list):
        raise FormatError(line_number, 'examples must be a list')
    examples = []
    for record in records:
        if (not isinstance(record, dict) or not isinstance(record.get('in'), str)
                or not isinstance(record.get('out'), str)):
            raise FormatError(line_number, 'example needs string "in" and "out" values')
        examples.append(Example(record['in'], record['out']))
    return tuple(examples)


def task_from_record(record, line_number=None):
    if not isinstance(record, dict) or 'examples' not in record:
        raise FormatError(line_number, 'task record needs an "examples" list')
    program = None
    if record.get('program') is not None:
        try:
            program = parse_program(record['program'])
        except ProgramSyntaxError as exception:
            raise FormatError(line_number, 'bad program: %s' % exception)
    examples = examples_from_records(record['examples'], line_number)
    if not examples:
        raise FormatError(line_number, 'task has no examples')
    return Task(examples, program, record.get('name'))


def dumps_task(task):
    return json.dumps(task_to_record(task), ensure_ascii=False)


def write_dataset(tasks, path):
    with open(path, 'w', encoding='utf-8', newline='\n') as open_file:
        for task in tasks:
            open_file.write(dumps_task(task))
            open_file.write('\n')
    logger.info('wrote %s tasks to %s', len(tasks), path)


def read_dataset(path):
    tasks = []
    with open(path, 'r', encoding='utf-8') as open_file:
        text = open_file.read()
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()
    for line_number, line in enumerate(lines, 1):
        if not line.strip():
            raise FormatError(line_number, 'blank line')
        try:
            record = json.loads(line)
        except ValueError as exception:
            raise FormatError(line_number, 'invalid JSON: %s' % exception)
        tasks.append(task_from_record(record, line_number))
    return tasks


def dataset_hash(path):
    with open(path, 'rb') as open_file:
        return utils.bytes_hash(open_file.read())


def split_of(task, split_ratios):
    """split name chosen by the hash of the program text"""
    if task.program is None:
        return 'test'
    digest = utils.text_hash(serialize_program(task.program))
    point = (int(digest[:12], 16) % SPLIT_BUCKETS) / float(SPLIT_BUCKETS)
    train_ratio, validation_ratio, _ = split_ratios
    if point < train_ratio:
        return 'train'
    if point < train_ratio + validation_ratio:
        return 'validation'
    return 'test'


def split_tasks(tasks, split_ratios=(0.8, 0.1, 0.1)):
    """dict of split name to tasks, no program shared between splits"""
    splits = {name: [] for name in SPLIT_NAMES}
    for task in tasks:
        splits[split_of(task, split_ratios)].append(task)
    return splits


def check_disjoint(first_tasks, second_tasks):
    """raise FormatError if any program appears in both task lists"""
    seen = {serialize_program(task.program) for task in first_tasks if task.program}
    for index, task in enumerate(second_tasks, 1):
        if task.program and serialize_program(task.program) in seen:
            raise FormatError(index, 'program %s appears in both splits' % (
                serialize_program(task.program)))
