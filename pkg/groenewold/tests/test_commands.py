import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase


def run(*args):
    stdout = StringIO()
    call_command(*args, stdout=stdout)
    return stdout.getvalue()


class SpectrumCommandTests(SimpleTestCase):
    def test_gaussian_csv(self):
        output = run("spectrum", "--family", "gaussian", "--s", "3", "--n-max", "2")
        self.assertEqual(
            output,
            "n,eigenvalue,method\n0,0.5,closed_form\n1,0.25,closed_form\n2,0.125,closed_form\n",
        )

    def test_scales_give_the_same_spectrum_as_s(self):
        by_s = run("spectrum", "--family", "gaussian", "--s", "3", "--n-max", "4")
        by_scales = run("spectrum", "--family", "gaussian", "--beta", "2", "--gamma", "1.5", "--n-max", "4")
        self.assertEqual(by_s, by_scales)

    def test_json_output(self):
        records = json.loads(run("spectrum", "--family", "uniform", "--s", "2", "--n-max", "3", "--format", "json"))
        self.assertEqual([record["n"] for record in records], [0, 1, 2, 3])
        self.assertEqual({record["method"] for record in records}, {"quadrature"})

    def test_reruns_are_byte_identical(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp) / "a" / "first.csv", Path(tmp) / "second.csv"
            for out in (first, second):
                run("spectrum", "--family", "uniform", "--s", "2.5", "--n-max", "20", "--out", str(out))
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_config_file_supplies_defaults(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = Path(tmp) / "run.json"
            config.write_text(json.dumps({"family": "gaussian", "s": 1, "n-max": 5}))
            output = run("spectrum", "--config", str(config), "--n-max", "1")
        self.assertEqual(output, "n,eigenvalue,method\n0,1,closed_form\n1,0,closed_form\n")

    def test_conflicting_options_exit_with_code_2(self):
        for args in (
            ("--family", "gaussian", "--s", "1", "--beta", "1", "--gamma", "1"),
            ("--s", "1",),
            ("--family", "gaussian", "--s", "-1"),
        ):
            with self.subTest(args=args), self.assertRaises(CommandError) as ctx:
                run("spectrum", *args)
            self.assertEqual(ctx.exception.returncode, 2)


class SweepCommandTests(SimpleTestCase):
    def test_gaussian_rows(self):
        output = run("sweep", "--family", "gaussian", "--s-min", "0.5", "--s-max", "2", "--steps", "4")
        lines = output.strip().split("\n")
        self.assertEqual(lines[0], "uncertainty_over_hbar,min_bound,max_bound,family")
        self.assertEqual(len(lines), 5)
        self.assertEqual(lines[2], "0.5,0,1,gaussian")

    def test_threads_give_identical_output(self):
        args = ("sweep", "--family", "gaussian", "--s-min", "0.2", "--s-max", "5", "--steps", "6")
        self.assertEqual(run(*args), run(*args, "--jobs", "3"))

    def test_missing_range_exits_with_code_2(self):
        with self.assertRaises(CommandError) as ctx:
            run("sweep", "--family", "gaussian", "--s-min", "0.5")
        self.assertEqual(ctx.exception.returncode, 2)


class QuantizeCommandTests(SimpleTestCase):
    def write_spec(self, tmp, spec):
        path = Path(tmp) / "density.json"
        path.write_text(json.dumps(spec))
        return str(path)

    def test_gaussian_matrix_export(self):
        with tempfile.TemporaryDirectory() as tmp:
            spec = self.write_spec(tmp, {"type": "gaussian", "beta": 1, "gamma": 1})
            payload = json.loads(run("quantize", "--density-spec", spec, "--n-max", "4", "--format", "json"))
        self.assertEqual(payload["dim"], 5)
        self.assertEqual(len(payload["entries"]), 25)
        self.assertAlmostEqual(payload["eigenvalues"][0], 1.0, places=7)
        self.assertAlmostEqual(payload["trace"], 1.0, places=7)
        np.testing.assert_allclose(payload["eigenvalues"][1:], 0.0, atol=1e-7)

    def test_rectangular_box_has_negative_eigenvalue(self):
        with tempfile.TemporaryDirectory() as tmp:
            spec = self.write_spec(tmp, {"type": "uniform_box", "q_half_width": 1, "p_half_width": 2})
            payload = json.loads(run("quantize", "--density-spec", spec, "--n-max", "16", "--format", "json"))
        self.assertEqual(payload["dim"], 17)
        self.assertEqual(len(payload["eigenvalues"]), 17)
        self.assertLess(min(payload["eigenvalues"]), 0.0)
        self.assertLessEqual(max(payload["eigenvalues"]), 2.0)

    def test_unnormalised_density_exits_with_code_4(self):
        with tempfile.TemporaryDirectory() as tmp:
            spec = self.write_spec(
                tmp, {"type": "uniform_box", "q_half_width": 1, "p_half_width": 1, "height": 0.5}
            )
            with self.assertRaises(CommandError) as ctx:
                run("quantize", "--density-spec", spec, "--n-max", "4")
        self.assertEqual(ctx.exception.returncode, 4)

    def test_missing_spec_exits_with_code_2(self):
        with self.assertRaises(CommandError) as ctx:
            run("quantize", "--density-spec", "/nonexistent/density.json")
        self.assertEqual(ctx.exception.returncode, 2)


class VerifyCommandTests(SimpleTestCase):
    def test_kernel_suite_passes(self):
        output = run("verify", "--only", "kernel")
        self.assertIn("All 4 checks passed.", output)

    def test_every_suite_passes_on_a_clean_build(self):
        output = run("verify")
        self.assertRegex(output, r"All \d+ checks passed\.")
        self.assertNotIn("FAIL", output)

    def test_unknown_group_exits_with_code_2(self):
        with self.assertRaises(CommandError) as ctx:
            run("verify", "--only", "astrology")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_flipped_parity_is_caught(self):
        """Dropping the (-1)^m factor from the kernel must fail the quantizer suite."""
        with mock.patch(
            "groenewold.services.quantizer._fock_parity",
            side_effect=lambda m: np.ones(np.shape(m)),
        ):
            with self.assertRaises(CommandError) as ctx:
                run("verify", "--only", "quantizer")
        self.assertEqual(ctx.exception.returncode, 1)
