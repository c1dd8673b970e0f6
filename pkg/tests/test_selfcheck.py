import unittest
from flashsynth.datagen import consistent
from flashsynth.selfcheck import (
    encoder_checks, interpreter_goldens, primitive_checks, r3nn_check, run_selfcheck, tiny_task)
from tests import create_config


class TestSelfcheck(unittest.TestCase):

    def test_goldens(self):
        results = interpreter_goldens()
        self.assertEqual(len(results), 3)
        for result in results:
            self.assertTrue(result.ok, result.detail)

    def test_primitives(self):
        results = primitive_checks()
        self.assertIn('grad embedding_lookup', [result.name for result in results])
        for result in results:
            self.assertTrue(result.ok, '%s %s' % (result.name, result.detail))

    def test_tiny_task(self):
        task = tiny_task()
        self.assertTrue(consistent(task.program, task.examples))

    def test_model_checks(self):
        synth_config = create_config('tiny')
        result = r3nn_check(synth_config, max_coords=20)
        self.assertTrue(result.ok, result.detail)
        for result in encoder_checks(synth_config, max_coords=10):
            self.assertTrue(result.ok, '%s %s' % (result.name, result.detail))

    def test_run_selfcheck(self):
        results = run_selfcheck(create_config('tiny'), max_coords=5)
        names = [result.name for result in results]
        self.assertEqual(names[:3], ['golden William Henry Charles', 'golden [CPT-00350',
                                     'golden 732606129'])
        self.assertEqual(names[-1], 'grad r3nn')
        self.assertEqual(results[0].to_dict()['ok'], True)


if __name__ == '__main__':
    unittest.main()
