"""Tests for rysbench.cli: verbs, exit codes and report output."""
from __future__ import annotations

import json

import pytest

from rysbench.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main


def _write(tmp_path, data, name='model.json'):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def _plain(tmp_path):
    """The running example with only the classical family."""
    return _write(tmp_path, {
        'name': 'm0',
        'universe': ['a', 'b', 'c', 'd', 'e'],
        'partition': [['a', 'b'], ['c'], ['d', 'e']],
        'rys': {'mode': 'nonempty-witness'},
    }, 'plain.json')


class TestTopLevel:
    def test_version(self, capsys):
        from rysbench import __version__
        assert main(['--version']) == EXIT_OK
        assert capsys.readouterr().out.strip() == f'rysbench {__version__}'

    def test_no_verb(self, capsys):
        assert main([]) == EXIT_ERROR
        assert 'a verb is required' in capsys.readouterr().err

    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main(['build-cera', '--input', 'x.json', '--colour'])
        assert info.value.code == 2


class TestErrors:
    def test_empty_universe(self, tmp_path, capsys):
        path = _write(tmp_path, {'universe': []})
        assert main(['build-cera', '--input', path]) == EXIT_ERROR
        assert 'rysbench: error:' in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(['check-approx', '--input', str(tmp_path / 'absent.json')]) == EXIT_ERROR

    def test_unknown_suite_file(self, tmp_path):
        assert main(['check-identities', '--input', _plain(tmp_path), '--suite', str(tmp_path / 'no.qid')]) \
            == EXIT_ERROR

    def test_suite_syntax_error(self, tmp_path, capsys):
        suite = tmp_path / 'bad.qid'
        suite.write_text('[ok] x = x\n[bad] join(x) = x\n')
        assert main(['check-identities', '--input', _plain(tmp_path), '--suite', str(suite)]) == EXIT_ERROR
        assert '2:6:' in capsys.readouterr().err

    def test_unknown_family(self, tmp_path):
        assert main(['check-approx', '--input', _plain(tmp_path), '--family', '9']) == EXIT_ERROR

    def test_unknown_granules(self, tmp_path):
        assert main(['check-granules', '--input', _plain(tmp_path), '--granules', 'nope']) == EXIT_ERROR


class TestVerbs:
    def _run(self, capsys, *argv):
        code = main(list(argv))
        return code, capsys.readouterr().out

    def test_check_approx(self, tmp_path, capsys):
        code, out = self._run(capsys, 'check-approx', '--input', _plain(tmp_path), '--subset', 'a,c,d')
        data = json.loads(out)
        assert code == EXIT_OK
        row = data['subset']['approximations'][0]
        assert row == {'family': 1, 'lower': ['c'], 'upper': ['a', 'b', 'c', 'd', 'e']}

    def test_check_duality_fails_for_cover(self, m0_file, capsys):
        code, out = self._run(capsys, 'check-duality', '--input', str(m0_file))
        data = json.loads(out)
        assert code == EXIT_FAILED
        assert [f['dual'] for f in data['families']] == [True, False]
        assert data['families'][1]['counterexample'] == ['a', 'b']

    def test_check_rys(self, tmp_path, capsys):
        code, out = self._run(capsys, 'check-rys', '--input', _plain(tmp_path))
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['mode'] == 'nonempty-witness'
        assert data['supplementation']['weak']['holds']

    def test_mereology_flag_overrides_file(self, tmp_path, capsys):
        code, out = self._run(capsys, 'check-rys', '--input', _plain(tmp_path), '--mereology', 'literal')
        assert json.loads(out)['mode'] == 'literal'

    def test_check_granules(self, tmp_path, capsys):
        code, out = self._run(capsys, 'check-granules', '--input', _plain(tmp_path))
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['admissible']
        assert not data['properties']['UU']['holds']

    def test_requested_property_failing(self, tmp_path, capsys):
        code, _ = self._run(capsys, 'check-granules', '--input', _plain(tmp_path), '--property', 'UU')
        assert code == EXIT_FAILED

    def test_single_block_fails_fu(self, tmp_path, capsys):
        path = _write(tmp_path, {'universe': ['a', 'b'], 'partition': [['a', 'b']]})
        code, _ = self._run(capsys, 'check-granules', '--input', path, '--mereology', 'nonempty-witness')
        assert code == EXIT_FAILED

    def test_granule_term(self, tmp_path, capsys):
        code, out = self._run(capsys, 'check-granules', '--input', _plain(tmp_path), '--property', 'FU',
                              '--subset', 'a,c,d', '--family', '1')
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['terms'] == [{'target': ['c'], 'term': '{c}'}]

    def test_check_identities(self, m0_file, capsys):
        code, out = self._run(capsys, 'check-identities', '--input', str(m0_file))
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['suite'] == 'cera-theorem'
        disputed = {r['label']: r for r in data['results'] if r.get('disputed')}
        assert disputed['ov-1.as-printed']['verdict'] == 'fails'
        assert disputed['ov-1.as-printed']['counterexample'] == {'x': {'tag': 't1', 'set': []}}
        assert disputed['ov-1.involution']['verdict'] == 'holds'

    def test_failing_suite_file(self, m0_file, tmp_path, capsys):
        suite = tmp_path / 'mine.qid'
        suite.write_text('[wrong] snot(x) = x\n')
        code, out = self._run(capsys, 'check-identities', '--input', str(m0_file), '--suite', str(suite))
        assert code == EXIT_FAILED
        assert json.loads(out)['suite'] == 'mine'

    def test_check_identities_text(self, m0_file, capsys):
        code, out = self._run(capsys, 'check-identities', '--input', str(m0_file), '--format', 'text')
        assert code == EXIT_OK
        assert out.splitlines()[0] == 'suite cera-theorem on m0 (exhaustive)'
        assert '(disputed)' in out
        assert out.rstrip().endswith('passed')

    def test_build_cera(self, m0_file, capsys):
        code, out = self._run(capsys, 'build-cera', '--input', str(m0_file), '--elements')
        data = json.loads(out)
        assert code == EXIT_OK
        assert (data['size'], data['type1'], data['type2']) == (50, 32, 18)
        assert data['constants']['one'] == {'tag': 't2', 'lower': ['a', 'b', 'c', 'd', 'e'],
                                            'upper': ['a', 'b', 'c', 'd', 'e']}
        assert len(data['elements']) == 50

    def test_quotient(self, m0_file, capsys):
        code, out = self._run(capsys, 'quotient', '--input', str(m0_file), '--explicit')
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['count'] == 18
        entry = next(c for c in data['classes'] if c['lower'] == ['c'] and len(c['upper']) == 5)
        assert entry['members'] == 4

    def test_generalized_quotient(self, tmp_path, capsys):
        code, out = self._run(capsys, 'quotient', '--input', _plain(tmp_path),
                              '--spec', 'x^l = y^l and x^u = y^u')
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['count'] == 18
        assert data['equivalence']

    def test_represent(self, m0_file, capsys):
        code, out = self._run(capsys, 'represent', '--input', str(m0_file))
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['status'] == 'found'
        assert data['shape'] == [2, 2, 1]

    def test_represent_bound(self, m0_file, capsys):
        code, out = self._run(capsys, 'represent', '--input', str(m0_file), '--max-n', '3')
        assert code == EXIT_FAILED
        assert json.loads(out)['status'] == 'none-within-bound'

    def test_crad_info(self, m0_file, capsys):
        code, out = self._run(capsys, 'crad-info', '--input', str(m0_file))
        data = json.loads(out)
        assert code == EXIT_OK
        assert data['pairs'] == 64
        assert data['carrier'] == 50

    def test_output_file_is_deterministic(self, m0_file, tmp_path):
        first, second = tmp_path / 'one.json', tmp_path / 'two.json'
        for target in (first, second):
            assert main(['check-identities', '--input', str(m0_file), '--output', str(target)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_text_format(self, m0_file, capsys):
        code, out = self._run(capsys, 'build-cera', '--input', str(m0_file), '--format', 'text')
        assert code == EXIT_OK
        assert 'size: 50' in out
        assert 'one: τ2 ({a,b,c,d,e}, {a,b,c,d,e})' in out
