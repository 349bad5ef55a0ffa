"""
Tests for the command-line interface.
"""

from typer.testing import CliRunner

from gapstress import __version__
from gapstress.cli import app
from gapstress.cli.main import EXIT_USAGE

runner = CliRunner()


class TestCli:
    """Tests for exit codes and output of the commands."""

    def test_qtab(self):
        """Test the Q table for d = 2."""
        result = runner.invoke(app, ["qtab", "-d", "2", "-m", "2,4"])
        assert result.exit_code == 0
        assert "3.14159" in result.stdout

    def test_capacity(self):
        """Test the capacity laws of two disks."""
        result = runner.invoke(app, ["capacity", "-e", "0.01"])
        assert result.exit_code == 0
        assert "31.4159" in result.stdout

    def test_capacity_bad_eps(self):
        """Test that eps >= 1/2 is a usage error."""
        result = runner.invoke(app, ["capacity", "-e", "0.7"])
        assert result.exit_code == EXIT_USAGE

    def test_field(self):
        """Test gradient predictions at two points."""
        result = runner.invoke(app, ["field", "-e", "0.01", "-x", "0,0", "-x", "0.1,0"])
        assert result.exit_code == 0
        assert "3.18" in result.stdout

    def test_field_bad_point(self):
        """Test that a malformed point is a usage error."""
        result = runner.invoke(app, ["field", "-e", "0.01", "-x", "0,0,0"])
        assert result.exit_code == EXIT_USAGE

    def test_moduli(self):
        """Test the asymptotic moduli table."""
        result = runner.invoke(app, ["moduli", "--eps-list", "0.04,0.02"])
        assert result.exit_code == 0
        assert "mu*" in result.stdout

    def test_moduli_oracle_order(self):
        """Test that the cell oracle is refused for m != 2."""
        result = runner.invoke(app, ["moduli", "-m", "4", "--oracle"])
        assert result.exit_code == EXIT_USAGE

    def test_verify_quick(self):
        """Test that the quick acceptance checks pass."""
        result = runner.invoke(app, ["verify"])
        assert result.exit_code == 0
        assert "skipped" in result.stdout

    def test_report_without_results(self, tmp_path):
        """Test that a directory without sweep output is a usage error."""
        result = runner.invoke(app, ["report", str(tmp_path)])
        assert result.exit_code == EXIT_USAGE

    def test_sweep_missing_config(self, tmp_path):
        """Test that a missing configuration is a usage error."""
        result = runner.invoke(app, ["sweep", "-c", str(tmp_path / "none.toml")])
        assert result.exit_code == EXIT_USAGE

    def test_version(self):
        """Test the version banner."""
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.stdout
