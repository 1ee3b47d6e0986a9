import pytest

from sentinel.source import (
    DirectoryMissing,
    SourceConfig,
    SourceMode,
    TargetNotFound,
    fetch_manifest,
    list_targets,
)


def dir_config(path) -> SourceConfig:
    return SourceConfig(mode=SourceMode.DIRECTORY, directory=str(path))


class TestListTargets:
    def test_lexicographic_order(self, tmp_path):
        (tmp_path / "b.yaml").write_text("kind: Pod\n")
        (tmp_path / "a.yaml").write_text("kind: Pod\n")
        targets = list_targets(dir_config(tmp_path))
        assert [t.pod_name for t in targets] == ["a", "b"]

    def test_manifest_suffix_stripped(self, tmp_path):
        (tmp_path / "testpod-manifest.yaml").write_text("kind: Pod\n")
        targets = list_targets(dir_config(tmp_path))
        assert targets[0].pod_name == "testpod"

    def test_yml_extension_and_ignores_others(self, tmp_path):
        (tmp_path / "p.yml").write_text("kind: Pod\n")
        (tmp_path / "notes.txt").write_text("ignored")
        targets = list_targets(dir_config(tmp_path))
        assert [t.pod_name for t in targets] == ["p"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DirectoryMissing):
            list_targets(dir_config(tmp_path / "nope"))

    def test_empty_directory(self, tmp_path):
        assert list_targets(dir_config(tmp_path)) == []

    def test_deterministic(self, tmp_path):
        for name in ("z.yaml", "a.yaml", "m.yml"):
            (tmp_path / name).write_text("kind: Pod\n")
        assert list_targets(dir_config(tmp_path)) == list_targets(dir_config(tmp_path))


class TestFetchManifest:
    def test_passthrough_and_persist(self, tmp_path):
        src = tmp_path / "src"
        out = tmp_path / "out"
        src.mkdir()
        (src / "a.yaml").write_text("kind: Pod\nmetadata: {name: a}\n")
        config = dir_config(src)
        target = list_targets(config)[0]
        manifest = fetch_manifest(target, config, out)
        assert manifest == "kind: Pod\nmetadata: {name: a}\n"
        assert (out / "manifest" / "a-manifest.yaml").read_text() == manifest

    def test_manifest_suffix_file_resolved(self, tmp_path):
        src = tmp_path / "src"
        out = tmp_path / "out"
        src.mkdir()
        (src / "testpod-manifest.yaml").write_text("kind: Pod\n")
        config = dir_config(src)
        target = list_targets(config)[0]
        fetch_manifest(target, config, out)
        assert (out / "manifest" / "testpod-manifest.yaml").is_file()

    def test_deleted_between_list_and_fetch(self, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        (src / "gone.yaml").write_text("kind: Pod\n")
        config = dir_config(src)
        target = list_targets(config)[0]
        (src / "gone.yaml").unlink()
        with pytest.raises(TargetNotFound):
            fetch_manifest(target, config, tmp_path / "out")
