import math

import numpy as np
import pytest

from palmcs import (
    ConfigError,
    ExperimentConfig,
    GrayImage,
    NoiseKind,
    NoiseSpec,
    OperatorKind,
    PalmParams,
    derive_seed,
    noise_grid_from_lists,
    parse_config,
    psnr_from_rmse,
    reconstruct_image,
    rows_to_csv,
    run_experiment,
    write_pgm_file,
)


def seeded_image(seed, h=12, w=12):
    rng = np.random.Generator(np.random.PCG64(seed))
    return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


def fast_cfg(paths, tmp_path, **overrides):
    base = dict(
        image_paths=paths,
        measurement_ratio=0.5,
        operator_kind=OperatorKind.GAUSSIAN_ORTHONORMAL,
        max_iter=150,
        tol=1e-4,
        master_seed=11,
        output_dir=tmp_path / "out",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="image"):
            ExperimentConfig(image_paths=())
        with pytest.raises(ValueError, match="ratio"):
            ExperimentConfig(image_paths=("a.pgm",), measurement_ratio=0.0)

    def test_derive_seed_is_deterministic_and_split(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
        assert derive_seed(7) != derive_seed(8)

    def test_noise_grid_covers_product(self):
        grid = noise_grid_from_lists(
            ["gaussian", "salt_pepper"], [0.02, 0.2], master_seed=3
        )
        assert len(grid) == 4
        assert {(s.kind.value, s.level) for s in grid} == {
            ("gaussian", 0.02),
            ("gaussian", 0.2),
            ("salt_pepper", 0.02),
            ("salt_pepper", 0.2),
        }
        seeds = [s.seed for s in grid]
        assert len(set(seeds)) == 4

    def test_parse_minimal(self, tmp_path):
        cfg = parse_config("images = a.pgm, b.pgm\n", base_dir=tmp_path)
        assert len(cfg.image_paths) == 2
        assert cfg.image_paths[0] == tmp_path / "a.pgm"
        assert cfg.noise_grid == ()
        assert cfg.operator_kind is OperatorKind.GAUSSIAN_ORTHONORMAL

    def test_parse_full(self, tmp_path):
        text = """
        # comment line
        images = img.pgm
        noise_kinds = gaussian, salt_pepper, speckle
        noise_levels = 0.02, 0.05, 0.10, 0.20
        measurement_ratio = 0.25   # inline comment
        operator = partial_dct
        master_seed = 99
        output_dir = results
        max_iter = 300
        tol = 1e-5
        mu_scale = 1e-4
        """
        cfg = parse_config(text, base_dir=tmp_path)
        assert len(cfg.noise_grid) == 12
        assert cfg.measurement_ratio == 0.25
        assert cfg.operator_kind is OperatorKind.PARTIAL_DCT
        assert cfg.master_seed == 99
        assert cfg.output_dir == tmp_path / "results"
        assert cfg.max_iter == 300 and cfg.tol == 1e-5 and cfg.mu_scale == 1e-4

    def test_parse_fixed_solver_params(self, tmp_path):
        text = "images = a.pgm\nmu = 0.1\nbeta = 2\ntau = 1\ngamma = 1\n"
        cfg = parse_config(text, base_dir=tmp_path)
        assert isinstance(cfg.solver, PalmParams)
        assert cfg.solver.mu == 0.1 and cfg.solver.beta == 2.0

    @pytest.mark.parametrize(
        "text,message",
        [
            ("", "missing the required 'images'"),
            ("images = a.pgm\nbogus = 1\n", "unknown config keys"),
            ("images = a.pgm\nimages = b.pgm\n", "duplicate"),
            ("images = a.pgm\nnoise_kinds = gaussian\n", "set together"),
            ("images = a.pgm\nmu = 0.1\n", "all of"),
            ("just some words\n", "expected 'key = value'"),
            ("images = a.pgm\nmeasurement_ratio = nope\n", "could not convert"),
        ],
    )
    def test_parse_errors(self, text, message, tmp_path):
        with pytest.raises(ConfigError, match=message):
            parse_config(text, base_dir=tmp_path)


class TestReconstructImage:
    def test_square_invertible_system_is_exact(self):
        img = seeded_image(0, 16, 16)
        cfg = ExperimentConfig(
            image_paths=("unused.pgm",),
            measurement_ratio=1.0,
            operator_kind=OperatorKind.PARTIAL_DCT,
            solver=PalmParams(
                mu=1e-3, beta=1.0, max_iter=4000,
                tol_feasibility=1e-9, tol_x_change=1e-9,
            ),
            master_seed=1,
        )
        _, report = reconstruct_image(img, cfg)
        assert report.rmse <= 1.0

    def test_constant_image_recovers_from_half_measurements(self):
        img = GrayImage(np.full((16, 16), 128, dtype=np.uint8))
        cfg = ExperimentConfig(
            image_paths=("unused.pgm",),
            measurement_ratio=0.5,
            operator_kind=OperatorKind.GAUSSIAN_ORTHONORMAL,
            master_seed=2,
        )
        recon, report = reconstruct_image(img, cfg)
        assert report.rmse <= 1.0
        assert np.all(np.abs(recon.to_float() - 128.0) <= 2.0)

    def test_deterministic_given_config(self):
        img = seeded_image(3, 8, 8)
        cfg = ExperimentConfig(
            image_paths=("unused.pgm",), measurement_ratio=0.5, master_seed=5,
            max_iter=200, tol=1e-4,
        )
        first, report_a = reconstruct_image(img, cfg)
        second, report_b = reconstruct_image(img, cfg)
        assert first == second
        assert report_a.rmse == report_b.rmse

    def test_incoherent_operator_beats_coherent_pairing(self):
        # the partial-DCT measurement of DCT-sparse blocks is a row subset of
        # the identity and loses unmeasured coefficients outright
        img = GrayImage(np.full((16, 16), 128, dtype=np.uint8))
        good = ExperimentConfig(
            image_paths=("u.pgm",), measurement_ratio=0.5,
            operator_kind=OperatorKind.GAUSSIAN_ORTHONORMAL, master_seed=2,
        )
        bad = ExperimentConfig(
            image_paths=("u.pgm",), measurement_ratio=0.5,
            operator_kind=OperatorKind.PARTIAL_DCT, master_seed=2,
        )
        _, good_report = reconstruct_image(img, good)
        _, bad_report = reconstruct_image(img, bad)
        assert good_report.rmse < 1.0 < bad_report.rmse

    def test_scores_against_supplied_reference(self):
        original = seeded_image(6, 8, 8)
        shifted = GrayImage(
            np.clip(original.to_float() + 40, 0, 255).astype(np.uint8)
        )
        cfg = ExperimentConfig(
            image_paths=("u.pgm",), measurement_ratio=1.0,
            operator_kind=OperatorKind.PARTIAL_DCT,
            solver=PalmParams(mu=1e-3, beta=1.0, max_iter=2000,
                              tol_feasibility=1e-9, tol_x_change=1e-9),
            master_seed=7,
        )
        _, self_scored = reconstruct_image(shifted, cfg)
        _, ref_scored = reconstruct_image(shifted, cfg, reference=original)
        assert self_scored.rmse <= 1.0
        assert ref_scored.rmse > 10.0


class TestRunExperiment:
    def test_clean_only_run_has_one_row_per_image(self, tmp_path):
        paths = []
        for i in range(3):
            path = tmp_path / f"img_{i}.pgm"
            write_pgm_file(path, seeded_image(i))
            paths.append(path)
        cfg = fast_cfg(tuple(paths), tmp_path)
        rows = run_experiment(cfg)
        assert len(rows) == 3
        assert all(row.noise_kind == "none" for row in rows)
        assert (cfg.output_dir / "results.csv").exists()
        assert len(list(cfg.output_dir.glob("*.pgm"))) == 3

    def test_grid_run_emits_clean_plus_noise_rows(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_file(path, seeded_image(9))
        grid = noise_grid_from_lists(
            ["gaussian", "speckle"], [0.05, 0.2], master_seed=11
        )
        cfg = fast_cfg((path,), tmp_path, noise_grid=grid)
        rows = run_experiment(cfg)
        assert len(rows) == 5  # 1 clean + 2 kinds x 2 levels
        assert rows[0].noise_kind == "none"
        assert [r.noise_kind for r in rows[1:]] == [
            "gaussian", "gaussian", "speckle", "speckle",
        ]
        assert all(row.status == "ok" for row in rows)
        csv_text = (cfg.output_dir / "results.csv").read_text()
        assert csv_text.splitlines()[0] == (
            "image_name,noise_kind,level_percent,psnr_db,rmse,elapsed_seconds,status"
        )
        assert len(csv_text.splitlines()) == 6
        assert len(list(cfg.output_dir.glob("*.pgm"))) == 5

    def test_rows_satisfy_psnr_rmse_relationship(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_file(path, seeded_image(10))
        grid = noise_grid_from_lists(["salt_pepper"], [0.1], master_seed=4)
        rows = run_experiment(fast_cfg((path,), tmp_path, noise_grid=grid))
        for row in rows:
            assert row.psnr_db == pytest.approx(psnr_from_rmse(row.rmse), abs=1e-3)

    def test_unreadable_image_is_reported_and_skipped(self, tmp_path):
        good = tmp_path / "good.pgm"
        write_pgm_file(good, seeded_image(12))
        bad = tmp_path / "missing.pgm"
        corrupt = tmp_path / "corrupt.pgm"
        corrupt.write_bytes(b"P5\n4 4\n255\n\x00")  # truncated payload
        rows = run_experiment(fast_cfg((bad, good, corrupt), tmp_path))
        assert [row.status.startswith("failed:unreadable") for row in rows] == [
            True, False, True,
        ]
        assert math.isnan(rows[0].psnr_db)
        assert rows[1].status == "ok"
        csv_text = (fast_cfg((bad,), tmp_path).output_dir / "results.csv").read_text()
        assert "failed:unreadable" in csv_text

    def test_deterministic_csv_and_artifacts(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm_file(path, seeded_image(13))
        grid = noise_grid_from_lists(["gaussian"], [0.1], master_seed=21)
        cfg_a = fast_cfg((path,), tmp_path, noise_grid=grid,
                         output_dir=tmp_path / "a", master_seed=21)
        cfg_b = fast_cfg((path,), tmp_path, noise_grid=grid,
                         output_dir=tmp_path / "b", master_seed=21)
        run_experiment(cfg_a)
        run_experiment(cfg_b)

        def masked_csv(directory):
            lines = (directory / "results.csv").read_text().splitlines()
            rows = [line.split(",") for line in lines]
            for row in rows[1:]:
                row[5] = "-"
            return rows

        assert masked_csv(cfg_a.output_dir) == masked_csv(cfg_b.output_dir)
        pgms_a = sorted(p.name for p in cfg_a.output_dir.glob("*.pgm"))
        pgms_b = sorted(p.name for p in cfg_b.output_dir.glob("*.pgm"))
        assert pgms_a == pgms_b
        for name in pgms_a:
            assert (cfg_a.output_dir / name).read_bytes() == (
                cfg_b.output_dir / name
            ).read_bytes()


def test_rows_to_csv_formats_sentinels():
    from palmcs import ExperimentRow

    rows = [
        ExperimentRow("img", "none", 0.0, math.inf, 0.0, 0.25),
        ExperimentRow("img", "gaussian", 2.0, math.nan, math.nan, 0.0, "failed:x"),
    ]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[1] == "img,none,0,inf,0.0000,0.250000,ok"
    assert lines[2] == "img,gaussian,2,nan,nan,0.000000,failed:x"
