"""Тесты для записи результатов."""

import io

import orjson
import pytest

from trap_kohn.services.frequency import ComplexFrequency
from trap_kohn.services.model import ModelParams, derive_constants
from trap_kohn.services.reporter import (
    constants_report,
    format_float,
    render_csv,
    render_json,
    render_spectrum,
    write_text,
    write_trajectory_csv,
)
from trap_kohn.services.response import Method, MobilitySample, MobilitySpectrum
from trap_kohn.services.timedomain import PhaseField, integrate_phase_field
from trap_kohn.utils.exceptions import OutputError


def _spectrum(params, *samples, **meta):
    return MobilitySpectrum(samples=tuple(samples), params=params, meta=meta)


def _sample(omega, value, method=Method.MODE_SUM, **kwargs):
    return MobilitySample(z=0.0, z0=0.5, freq=ComplexFrequency(omega, 0.0), value=value, method=method, **kwargs)


class TestFormatFloat:
    """Тесты форматирования чисел."""

    def test_shortest_repr(self):
        """Кратчайшее обратимое представление."""
        assert format_float(0.1) == "0.1"
        assert format_float(1e-20) == "1e-20"

    def test_negative_zero(self):
        """Отрицательный ноль пишется как 0.0."""
        assert format_float(-0.0) == "0.0"


class TestCsv:
    """Тесты CSV-вывода."""

    def test_single_row(self, params_06):
        """Схема omega,re_mu,im_mu,method."""
        text = render_csv(_spectrum(params_06, _sample(0.5, complex(-0.0, -0.1))))
        assert text == "omega,re_mu,im_mu,method\n0.5,0.0,-0.1,mode_sum\n"

    def test_rel_diff_column(self, params_06):
        """Столбец rel_diff появляется только при сравнении."""
        spectrum = _spectrum(
            params_06,
            _sample(0.5, -0.1j, method=Method.CLOSED_FORM, rel_diff=1e-9),
            _sample(0.6, -0.2j, method=Method.CLOSED_FORM, rel_diff=2e-9),
        )
        lines = render_csv(spectrum).splitlines()
        assert lines[0] == "omega,re_mu,im_mu,method,rel_diff"
        assert lines[2] == "0.6,0.0,-0.2,closed_form,2e-09"

    def test_deterministic(self, params_06):
        """Одинаковый вход даёт одинаковый текст."""
        spectrum = _spectrum(params_06, _sample(0.5, 0.25 - 0.125j))
        assert render_csv(spectrum) == render_csv(spectrum)


class TestJson:
    """Тесты JSON-вывода."""

    def test_structure(self, params_06):
        """Объект params, meta и массив samples."""
        spectrum = _spectrum(params_06, _sample(0.5, 0.25 - 0.125j, near_pole=True), n_max=100)
        text = render_json(spectrum)
        assert text.endswith("\n")
        data = orjson.loads(text)
        assert data["params"]["vtilde_c"] == 0.6
        assert data["meta"] == {"n_max": 100}
        (sample,) = data["samples"]
        assert sample["re_mu"] == 0.25
        assert sample["im_mu"] == -0.125
        assert sample["method"] == "mode_sum"
        assert sample["near_pole"] is True
        assert sample["rel_diff"] is None

    def test_unknown_format(self, params_06):
        """Неизвестный формат: ошибка вывода."""
        with pytest.raises(OutputError):
            render_spectrum(_spectrum(params_06, _sample(0.5, -0.1j)), "xml")


class TestWriteText:
    """Тесты записи в файл и stdout."""

    def test_stream(self):
        """Без пути текст пишется в поток."""
        stream = io.StringIO()
        write_text("abc\n", stream=stream)
        assert stream.getvalue() == "abc\n"

    def test_file(self, output_dir):
        """Запись в файл с созданием директорий."""
        path = output_dir / "nested" / "mu.csv"
        write_text("abc\n", str(path))
        assert path.read_text() == "abc\n"

    def test_directory_target(self, output_dir):
        """Запись в директорию превращается в OutputError."""
        with pytest.raises(OutputError) as exc_info:
            write_text("abc\n", str(output_dir))
        assert exc_info.value.path == str(output_dir)


class TestTrajectoryCsv:
    """Тесты записи траектории."""

    def test_snapshots(self, params_06, dc_06, output_dir):
        """Столбцы t и phi[j] по снимкам."""
        trajectory = integrate_phase_field(
            PhaseField.at_rest(15), None, params_06, dc_06, dt=0.1, t_end=0.3, record_every=1
        )
        path = output_dir / "traj.csv"
        write_trajectory_csv(str(path), trajectory, [1, 8])
        lines = path.read_text().splitlines()
        assert lines[0] == "t,phi[1],phi[8]"
        assert len(lines) == 1 + len(trajectory.snapshots)
        assert lines[1] == "0.0,0.0,0.0"

    def test_no_snapshots(self, params_06, dc_06, output_dir):
        """Без снимков писать нечего."""
        trajectory = integrate_phase_field(PhaseField.at_rest(15), None, params_06, dc_06, dt=0.1, t_end=0.3)
        with pytest.raises(OutputError):
            write_trajectory_csv(str(output_dir / "traj.csv"), trajectory, [1])

    def test_bad_node(self, params_06, dc_06, output_dir):
        """Узел вне сетки отклоняется."""
        trajectory = integrate_phase_field(
            PhaseField.at_rest(15), None, params_06, dc_06, dt=0.1, t_end=0.3, record_every=1
        )
        with pytest.raises(OutputError):
            write_trajectory_csv(str(output_dir / "traj.csv"), trajectory, [17])


class TestConstantsReport:
    """Тесты текстового отчёта о константах."""

    def test_lines(self, params_06, dc_06):
        """K и ε̃ для Ṽ_c = 0.6."""
        lines = dict(line.split(" = ") for line in constants_report(params_06, dc_06).splitlines())
        assert float(lines["K"]) == pytest.approx(2.0, rel=1e-12)
        assert float(lines["eps_tilde"]) == pytest.approx(0.8, rel=1e-12)
        assert float(lines["identity_splitting_residual"]) < 1e-12
        assert "k_fermi" not in lines

    def test_oscillator_lengths(self):
        """При заданных N и α в отчёт попадают L_F и k_F."""
        params = ModelParams.from_oscillator(0.3, 8, 2.0)
        lines = dict(line.split(" = ") for line in constants_report(params, derive_constants(params)).splitlines())
        assert float(lines["l_fermi"]) == pytest.approx(2.0)
        assert float(lines["k_fermi"]) == pytest.approx(8.0)
