from flashsynth.corpus import write_dataset
from flashsynth.datagen import Example, Task
from flashsynth.syntax import parse_program


if __name__ == '__main__':
    TASKS = []
    TASKS.append(Task(
        (Example('ab cd', 'a'), Example('b', 'b')),
        parse_program('Concat(SubStr(ConstPos(0), ConstPos(1)))'), 'first_char'))
    TASKS.append(Task(
        (Example('x@y', 'x@'), Example('q', 'q@')),
        parse_program('Concat(SubStr(ConstPos(0), ConstPos(1)), ConstStr("@"))'),
        'first_char_at'))
    TASKS.append(Task(
        (Example('ab12c', '12'), Example('7 x', '7')),
        parse_program('Concat(SubStr(Match(Digits, 1, Start), Match(Digits, 1, End)))'),
        'first_number'))
    write_dataset(TASKS, 'tests/test_data/tasks.jsonl')
