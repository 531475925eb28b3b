import numpy as np
import pytest

from labelloop.data import (
    ConfigError,
    EmbeddingDataset,
    FormatError,
    SplitSpec,
    UNKNOWN_LABEL,
    generate_synthetic,
    make_rng,
    read_embedding_file,
    split,
    write_embedding_file,
)


class TestSplit:
    def test_sizes_10(self):
        ds = generate_synthetic(2, 5, 3, 1.0, make_rng(0))
        train, test = split(ds, SplitSpec(0.8, 1))
        assert len(train) == 8 and len(test) == 2
        assert set(train).isdisjoint(test)
        assert sorted(np.concatenate([train, test])) == list(range(10))

    def test_sizes_100k(self):
        # 80:20 on a 100k pool gives an 80k training split.
        assert round(0.8 * 100_000) == 80_000

    def test_same_seed_same_partition(self):
        ds = generate_synthetic(3, 20, 4, 2.0, make_rng(0))
        a = split(ds, SplitSpec(0.8, 42))
        b = split(ds, SplitSpec(0.8, 42))
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_different_seeds_differ(self):
        ds = generate_synthetic(3, 40, 4, 2.0, make_rng(0))
        differing = 0
        for seed in range(100):
            a, _ = split(ds, SplitSpec(0.8, seed))
            b, _ = split(ds, SplitSpec(0.8, seed + 1000))
            if not np.array_equal(a, b):
                differing += 1
        assert differing >= 99

    @pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
    def test_bad_fraction(self, fraction):
        ds = generate_synthetic(2, 5, 3, 1.0, make_rng(0))
        with pytest.raises(ConfigError):
            split(ds, SplitSpec(fraction, 1))


class TestSynthetic:
    def test_two_samples(self, rng):
        ds = generate_synthetic(2, 1, 4, 0.0, rng)
        assert ds.n == 2
        assert sorted(ds.labels.tolist()) == [0, 1]

    def test_labels_match_generating_centre(self, rng):
        ds = generate_synthetic(4, 25, 8, 50.0, rng)
        centres = np.zeros((4, 8))
        centres[np.arange(4), np.arange(4)] = 50.0 / np.sqrt(2)
        # With huge separation, each sample is closest to its own centre.
        d = ((ds.features[:, None, :] - centres[None]) ** 2).sum(-1)
        assert np.array_equal(np.argmin(d, axis=1), ds.labels)

    def test_centre_distances(self, rng):
        sep = 8.0
        scale = sep / np.sqrt(2)
        centres = np.zeros((9, 32))
        centres[np.arange(9), np.arange(9)] = scale
        d = np.linalg.norm(centres[:, None] - centres[None], axis=-1)
        off = d[~np.eye(9, dtype=bool)]
        assert np.allclose(off, sep)

    def test_dim_too_small(self, rng):
        with pytest.raises(ConfigError):
            generate_synthetic(5, 10, 3, 1.0, rng)

    def test_preconditions(self, rng):
        with pytest.raises(ConfigError):
            generate_synthetic(1, 10, 3, 1.0, rng)
        with pytest.raises(ConfigError):
            generate_synthetic(2, 0, 3, 1.0, rng)
        with pytest.raises(ConfigError):
            generate_synthetic(2, 10, 3, -1.0, rng)

    def test_zero_separation_near_chance(self):
        # Classes are indistinguishable: a trained head stays near 50%.
        from labelloop.linear import TrainConfig, init_xavier, predict_proba, train

        accs = []
        for seed in range(5):
            rng = make_rng(seed)
            ds = generate_synthetic(2, 200, 8, 0.0, rng)
            train_idx = np.arange(0, 400, 2)
            test_idx = np.arange(1, 400, 2)
            head = train(
                init_xavier(8, 2, rng),
                ds.features[train_idx],
                ds.labels[train_idx],
                TrainConfig(learning_rate=0.02, epochs=100),
                rng,
            )
            preds = np.argmax(predict_proba(head, ds.features[test_idx]), axis=1)
            accs.append((preds == ds.labels[test_idx]).mean())
        assert abs(np.mean(accs) - 0.5) < 0.05

    def test_full_label_training_separates(self):
        # The acceptance dataset is linearly separable with all labels.
        from labelloop.linear import TrainConfig, init_xavier, predict_proba, train

        rng = make_rng(7)
        ds = generate_synthetic(9, 500, 32, 8.0, rng)
        head = train(
            init_xavier(32, 9, rng),
            ds.features,
            ds.labels,
            TrainConfig(learning_rate=0.0004, batch_size=128, epochs=200),
            rng,
        )
        preds = np.argmax(predict_proba(head, ds.features), axis=1)
        assert (preds == ds.labels).mean() > 0.99


class TestEmbeddingFile:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        ds = generate_synthetic(2, 2, 4, 1.0, rng)
        path = tmp_path / "small.emb"
        write_embedding_file(ds, path)
        back = read_embedding_file(path)
        assert back.features.tobytes() == ds.features.tobytes()
        assert np.array_equal(back.labels, ds.labels)
        assert back.k_classes == ds.k_classes

    def test_write_read_write_identical_bytes(self, rng, tmp_path):
        ds = generate_synthetic(3, 7, 5, 2.0, rng)
        p1, p2 = tmp_path / "a.emb", tmp_path / "b.emb"
        write_embedding_file(ds, p1)
        write_embedding_file(read_embedding_file(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.emb"
        path.write_bytes(b"XXXX" + b"\x00" * 40)
        with pytest.raises(FormatError) as err:
            read_embedding_file(path)
        assert err.value.offset == 0

    def test_truncated(self, rng, tmp_path):
        ds = generate_synthetic(2, 3, 4, 1.0, rng)
        path = tmp_path / "trunc.emb"
        write_embedding_file(ds, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-5])
        with pytest.raises(FormatError) as err:
            read_embedding_file(path)
        assert "truncated" in str(err.value)

    def test_unknown_label_sentinel(self, tmp_path):
        ds = EmbeddingDataset(
            np.zeros((3, 2), dtype=np.float32),
            np.array([0, UNKNOWN_LABEL, 1], dtype=np.int32),
            k_classes=2,
        )
        path = tmp_path / "unk.emb"
        write_embedding_file(ds, path)
        back = read_embedding_file(path)
        assert back.labels[1] == UNKNOWN_LABEL

    def test_label_out_of_range_names_offset(self, rng, tmp_path):
        ds = generate_synthetic(2, 2, 3, 1.0, rng)
        path = tmp_path / "badlabel.emb"
        write_embedding_file(ds, path)
        blob = bytearray(path.read_bytes())
        label_off = 24 + 4 * ds.n * ds.dim
        bad_pos = label_off + 4 * 2  # third label
        blob[bad_pos : bad_pos + 4] = (9).to_bytes(4, "little")
        path.write_bytes(bytes(blob))
        with pytest.raises(FormatError) as err:
            read_embedding_file(path)
        assert err.value.offset == bad_pos


class TestDataset:
    def test_ids_default_and_unique(self, rng):
        ds = generate_synthetic(2, 3, 2, 1.0, rng)
        assert np.array_equal(ds.ids, np.arange(6))
        with pytest.raises(ConfigError):
            EmbeddingDataset(
                np.zeros((2, 2), dtype=np.float32),
                np.array([0, 1], dtype=np.int32),
                2,
                ids=np.array([5, 5]),
            )

    def test_label_range_checked(self):
        with pytest.raises(ConfigError):
            EmbeddingDataset(
                np.zeros((2, 2), dtype=np.float32),
                np.array([0, 7], dtype=np.int32),
                k_classes=2,
            )

    def test_rng_is_deterministic(self):
        a = make_rng(99).standard_normal(16)
        b = make_rng(99).standard_normal(16)
        assert np.array_equal(a, b)
