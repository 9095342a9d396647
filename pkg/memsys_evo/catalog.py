from memsys_evo.errors import (CatalogParseError, NoEligibleCompiler,
                               PreconditionViolation, ValidationError)

from dataclasses import dataclass
from functools import cached_property
import json
import logging
from typing import Mapping, Tuple

import numpy as np


logger = logging.getLogger(__name__)

MEMORY_KINDS = ('SRAM', 'ROM', 'RF')


@dataclass(frozen=True)
class Region:
    """Inclusive ranges of words and bits for which a rule applies."""
    words: Tuple[int, int]
    bits: Tuple[int, int]

    def contains(self, words, bits):
        return (self.words[0] <= words <= self.words[1] and
                self.bits[0] <= bits <= self.bits[1])

    def overlaps(self, other):
        return (self.words[0] <= other.words[1] and
                other.words[0] <= self.words[1] and
                self.bits[0] <= other.bits[1] and
                other.bits[0] <= self.bits[1])


@dataclass(frozen=True)
class MemoryRequirement:
    id: str
    words: int
    bits: int
    ports: int
    kind: str


@dataclass(frozen=True)
class ParameterSpec:
    """
    An architectural parameter. Its codes are the positions of its
    labels, so a parameter with labels ('lvt', 'svt', 'hvt') has codes
    0, 1 and 2.
    """
    name: str
    labels: Tuple[str, ...]

    @property
    def codes(self):
        return tuple(range(len(self.labels)))


@dataclass(frozen=True)
class ChoiceRule:
    when: Region
    param: str
    allowed: Tuple[int, ...]


@dataclass(frozen=True)
class ComboRule:
    when: Region
    params: Tuple[str, ...]
    allowed: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class SurrogateModel:
    """
    Analytic PPA model of one compiler. For objective m,

        value = (c0 + c1*words*bits + c2*words + c3*bits)
                * product over parameters of multipliers[m][param][code]
    """
    base: Mapping[str, Tuple[float, float, float, float]]
    multipliers: Mapping[str, Mapping[str, Tuple[float, ...]]]


@dataclass(frozen=True)
class CompilerSpec:
    name: str
    kind: str
    ports: int
    words_range: Tuple[int, int]
    bits_range: Tuple[int, int]
    params: Tuple[ParameterSpec, ...]
    choice_rules: Tuple[ChoiceRule, ...]
    combo_rules: Tuple[ComboRule, ...]
    surrogate: SurrogateModel

    def param(self, name):
        """Returns the ParameterSpec with the given name."""
        for param in self.params:
            if param.name == name:
                return param
        raise KeyError(name)

    @cached_property
    def param_index(self):
        """dict: Parameter name to position in declaration order."""
        return {param.name: i for i, param in enumerate(self.params)}

    def combo_rules_at(self, words, bits):
        """The combo rules that apply to a memory of this size."""
        return [rule for rule in self.combo_rules
                if rule.when.contains(words, bits)]

    def builds(self, mem):
        """Whether this compiler can build the given memory."""
        return (self.kind == mem.kind and self.ports == mem.ports and
                self.words_range[0] <= mem.words <= self.words_range[1] and
                self.bits_range[0] <= mem.bits <= self.bits_range[1])


@dataclass(frozen=True)
class Catalog:
    objectives: Tuple[str, ...]
    compilers: Tuple[CompilerSpec, ...]

    def compiler(self, name):
        """Returns the compiler with the given name."""
        return self._by_name[name]

    @cached_property
    def _by_name(self):
        return {comp.name: comp for comp in self.compilers}


@dataclass(frozen=True)
class SystemSpec:
    memories: Tuple[MemoryRequirement, ...]


def eligible_compilers(catalog, mem):
    """
    Finds the compilers that can build a memory.

    Args:
        catalog (Catalog): The design space.
        mem (MemoryRequirement): The memory to build.

    Returns:
        [CompilerSpec]: Compilers of the right kind and port count whose
            ranges contain the memory, in catalog order.

    Raises:
        NoEligibleCompiler: No compiler can build this memory.
    """
    eligible = [comp for comp in catalog.compilers if comp.builds(mem)]
    if not eligible:
        raise NoEligibleCompiler(mem.id)
    return eligible


def feasible_codes(comp, mem, param):
    """
    Returns the codes that a parameter not governed by a combinatorial
    constraint may take for this memory.

    All choice rules of the parameter that apply to the memory's size
    restrict the result.

    Args:
        comp (CompilerSpec): The chosen compiler.
        mem (MemoryRequirement): The memory being built.
        param (str): Name of the parameter.

    Returns:
        [int]: Feasible codes, ascending.

    Raises:
        PreconditionViolation: The parameter is part of a combo rule
            that applies to this memory.
    """
    for rule in comp.combo_rules_at(mem.words, mem.bits):
        if param in rule.params:
            raise PreconditionViolation(
                    'Parameter {!r} of compiler {!r} is governed by a combo'
                    ' rule for memory {!r}'.format(param, comp.name, mem.id))
    return _choice_codes(comp, param, mem.words, mem.bits)


def feasible_combinations(comp, mem, group):
    """
    Returns the allowed tuples of a combo rule, sorted.

    Args:
        comp (CompilerSpec): The chosen compiler.
        mem (MemoryRequirement): The memory being built.
        group (ComboRule): One of the compiler's combo rules.

    Returns:
        [tuple]: The allowed code tuples, lexicographically ascending.

    Raises:
        PreconditionViolation: The rule does not apply to this memory.
    """
    if not group.when.contains(mem.words, mem.bits):
        raise PreconditionViolation(
                'Combo rule over {} of compiler {!r} does not apply to'
                ' memory {!r}'.format(list(group.params), comp.name, mem.id))
    return sorted(group.allowed)


def _choice_codes(comp, param, words, bits):
    codes = set(comp.param(param).codes)
    for rule in comp.choice_rules:
        if rule.param == param and rule.when.contains(words, bits):
            codes &= set(rule.allowed)
    return sorted(codes)


def surrogate_tables(catalog, comp):
    """
    Numeric form of a compiler's surrogate model.

    Returns:
        Tuple[np.ndarray, List[np.ndarray]]: Base coefficients with
            shape (M, 4), and per parameter in declaration order an
            array of multipliers with shape (M, number of codes).
    """
    base = np.array([comp.surrogate.base[obj] for obj in catalog.objectives],
                    dtype=float)
    mults = [np.array([comp.surrogate.multipliers[obj][param.name]
                       for obj in catalog.objectives], dtype=float)
             for param in comp.params]
    return base, mults


# Loading

def load_catalog(path):
    """
    Loads and validates a catalog file.

    Args:
        path (str): Path to a UTF-8 JSON catalog.

    Returns:
        Catalog: The validated catalog.

    Raises:
        CatalogParseError: The file is not valid JSON of the right shape.
        ValidationError: The catalog violates an invariant.
    """
    data = _read_json(path)
    catalog = catalog_from_dict(data)
    validate_catalog(catalog)
    logger.debug('Loaded catalog %s with %d compilers', path,
                 len(catalog.compilers))
    return catalog


def load_system(path):
    """
    Loads and validates a system file.

    Args:
        path (str): Path to a UTF-8 JSON system description.

    Returns:
        SystemSpec: The validated system.

    Raises:
        CatalogParseError: The file is not valid JSON of the right shape.
        ValidationError: The system violates an invariant.
    """
    system = system_from_dict(_read_json(path))
    validate_system(system)
    return system


def _read_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CatalogParseError('{}: {}'.format(path, e))


def catalog_from_dict(data):
    """
    Builds a Catalog from its JSON form, without validating it.

    Raises:
        CatalogParseError: Keys are missing or have the wrong type.
    """
    try:
        return Catalog(
                objectives=tuple(_str(o, 'objective')
                                 for o in _list(data['objectives'],
                                                'objectives')),
                compilers=tuple(_compiler_from_dict(c)
                                for c in _list(data['compilers'],
                                               'compilers')))
    except (KeyError, TypeError, ValueError) as e:
        raise CatalogParseError(
                'Catalog does not match the schema: {}: {}'.format(
                    type(e).__name__, e))


def _list(value, what):
    if not isinstance(value, list):
        raise TypeError('{} must be a list, got {!r}'.format(what, value))
    return value


def _dict(value, what):
    if not isinstance(value, dict):
        raise TypeError('{} must be an object, got {!r}'.format(what, value))
    return value


def _str(value, what):
    if not isinstance(value, str):
        raise TypeError('{} must be a string, got {!r}'.format(what, value))
    return value


def _int(value, what):
    # bool is an int subclass; JSON true is not a count.
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError('{} must be an integer, got {!r}'.format(what, value))
    return value


def _number(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError('{} must be a number, got {!r}'.format(what, value))
    return float(value)


def _region_from_dict(when):
    return Region(words=_pair(when['words'], 'words'),
                  bits=_pair(when['bits'], 'bits'))


def _pair(value, what):
    lo, hi = _list(value, what)
    return _int(lo, what), _int(hi, what)


def _codes(values, what):
    return tuple(_int(c, what) for c in _list(values, what))


def _compiler_from_dict(data):
    surrogate = _dict(data['surrogate'], 'surrogate')
    return CompilerSpec(
            name=_str(data['name'], 'name'),
            kind=_str(data['kind'], 'kind'),
            ports=_int(data['ports'], 'ports'),
            words_range=_pair(data['words_range'], 'words_range'),
            bits_range=_pair(data['bits_range'], 'bits_range'),
            params=tuple(ParameterSpec(_str(p['name'], 'parameter name'),
                                       tuple(_str(c, 'code label') for c in
                                             _list(p['codes'], 'codes')))
                         for p in _list(data['params'], 'params')),
            choice_rules=tuple(
                ChoiceRule(_region_from_dict(r['when']),
                           _str(r['param'], 'param'),
                           _codes(r['allowed'], 'allowed'))
                for r in _list(data.get('choice_rules', []),
                               'choice_rules')),
            combo_rules=tuple(
                ComboRule(_region_from_dict(r['when']),
                          tuple(_str(p, 'params')
                                for p in _list(r['params'], 'params')),
                          tuple(_codes(t, 'allowed')
                                for t in _list(r['allowed'], 'allowed')))
                for r in _list(data.get('combo_rules', []),
                               'combo_rules')),
            surrogate=SurrogateModel(
                base={obj: tuple(_number(c, 'base')
                                 for c in _list(s['base'], 'base'))
                      for obj, s in surrogate.items()},
                multipliers={obj: _multipliers_from_dict(s['multipliers'])
                             for obj, s in surrogate.items()}))


def _multipliers_from_dict(data):
    return {param: tuple(_number(m, 'multipliers')
                         for m in _list(ms, 'multipliers'))
            for param, ms in _dict(data, 'multipliers').items()}


def system_from_dict(data):
    """
    Builds a SystemSpec from its JSON form, without validating it.

    Raises:
        CatalogParseError: Keys are missing or have the wrong type.
    """
    try:
        return SystemSpec(memories=tuple(
            MemoryRequirement(id=_str(m['id'], 'id'),
                              words=_int(m['words'], 'words'),
                              bits=_int(m['bits'], 'bits'),
                              ports=_int(m['ports'], 'ports'),
                              kind=_str(m['kind'], 'kind'))
            for m in _list(data['memories'], 'memories')))
    except (KeyError, TypeError, ValueError) as e:
        raise CatalogParseError(
                'System does not match the schema: {}: {}'.format(
                    type(e).__name__, e))


def catalog_to_dict(catalog):
    """Converts a Catalog to its JSON form."""
    def region(when):
        return {'words': list(when.words), 'bits': list(when.bits)}

    return {
        'objectives': list(catalog.objectives),
        'compilers': [{
            'name': comp.name,
            'kind': comp.kind,
            'ports': comp.ports,
            'words_range': list(comp.words_range),
            'bits_range': list(comp.bits_range),
            'params': [{'name': p.name, 'codes': list(p.labels)}
                       for p in comp.params],
            'choice_rules': [{'when': region(r.when), 'param': r.param,
                              'allowed': list(r.allowed)}
                             for r in comp.choice_rules],
            'combo_rules': [{'when': region(r.when), 'params': list(r.params),
                             'allowed': [list(t) for t in r.allowed]}
                            for r in comp.combo_rules],
            'surrogate': {
                obj: {'base': list(comp.surrogate.base[obj]),
                      'multipliers': {
                          p: list(ms) for p, ms in
                          comp.surrogate.multipliers[obj].items()}}
                for obj in catalog.objectives}
            } for comp in catalog.compilers]
        }


def system_to_dict(system):
    """Converts a SystemSpec to its JSON form."""
    return {'memories': [{'id': m.id, 'words': m.words, 'bits': m.bits,
                          'ports': m.ports, 'kind': m.kind}
                         for m in system.memories]}


def dump_json(data):
    """Serializes to JSON text that is stable byte for byte."""
    return json.dumps(data, indent=2, sort_keys=True) + '\n'


# Validation

def validate_system(system):
    """
    Checks the invariants of a SystemSpec.

    Raises:
        ValidationError: Names the first violated invariant.
    """
    if not system.memories:
        raise ValidationError('System has no memories')
    seen = set()
    for i, mem in enumerate(system.memories):
        where = 'memories[{}] {!r}'.format(i, mem.id)
        if mem.id in seen:
            raise ValidationError('{}: duplicate memory id'.format(where))
        seen.add(mem.id)
        for attr in ('words', 'bits', 'ports'):
            if getattr(mem, attr) < 1:
                raise ValidationError('{}: {} must be at least 1'.format(
                    where, attr))
        if mem.kind not in MEMORY_KINDS:
            raise ValidationError('{}: unknown kind {!r}'.format(
                where, mem.kind))


def validate_catalog(catalog):
    """
    Checks every invariant of a Catalog and the types it contains.

    Raises:
        ValidationError: Names the first violated invariant and its
            location.
    """
    if not catalog.objectives:
        raise ValidationError('Catalog has no objectives')
    if len(set(catalog.objectives)) != len(catalog.objectives):
        raise ValidationError('Catalog objective names are not unique')
    names = set()
    for i, comp in enumerate(catalog.compilers):
        where = 'compilers[{}] {!r}'.format(i, comp.name)
        if comp.name in names:
            raise ValidationError('{}: duplicate compiler name'.format(where))
        names.add(comp.name)
        _validate_compiler(catalog, comp, where)


def _validate_range(rng, what, where):
    lo, hi = rng
    if lo < 1 or hi < lo:
        raise ValidationError('{}: {} {} is not a range of positive'
                              ' integers'.format(where, what, list(rng)))


def _validate_compiler(catalog, comp, where):
    if comp.kind not in MEMORY_KINDS:
        raise ValidationError('{}: unknown kind {!r}'.format(where, comp.kind))
    if comp.ports < 1:
        raise ValidationError('{}: ports must be at least 1'.format(where))
    _validate_range(comp.words_range, 'words_range', where)
    _validate_range(comp.bits_range, 'bits_range', where)

    params = {}
    for j, param in enumerate(comp.params):
        if param.name in params:
            raise ValidationError('{}: params[{}]: duplicate parameter name'
                                  ' {!r}'.format(where, j, param.name))
        if not param.labels:
            raise ValidationError('{}: params[{}] {!r} has no codes'.format(
                where, j, param.name))
        if len(set(param.labels)) != len(param.labels):
            raise ValidationError('{}: params[{}] {!r}: labels are not'
                                  ' unique'.format(where, j, param.name))
        params[param.name] = param

    for j, rule in enumerate(comp.choice_rules):
        rwhere = '{}: choice_rules[{}]'.format(where, j)
        _validate_region(rule.when, rwhere)
        if rule.param not in params:
            raise ValidationError('{}: unknown parameter {!r}'.format(
                rwhere, rule.param))
        if not rule.allowed:
            raise ValidationError('{}: allowed codes are empty'.format(rwhere))
        ncodes = len(params[rule.param].labels)
        for code in rule.allowed:
            if not 0 <= code < ncodes:
                raise ValidationError(
                        '{}: code {} out of range for parameter {!r} ({}'
                        ' codes)'.format(rwhere, code, rule.param, ncodes))

    for j, rule in enumerate(comp.combo_rules):
        rwhere = '{}: combo_rules[{}]'.format(where, j)
        _validate_region(rule.when, rwhere)
        if not rule.params:
            raise ValidationError('{}: no parameters'.format(rwhere))
        if len(set(rule.params)) != len(rule.params):
            raise ValidationError('{}: parameter listed twice'.format(rwhere))
        for name in rule.params:
            if name not in params:
                raise ValidationError('{}: unknown parameter {!r}'.format(
                    rwhere, name))
        if not rule.allowed:
            raise ValidationError('{}: allowed set is empty'.format(rwhere))
        for combo in rule.allowed:
            if len(combo) != len(rule.params):
                raise ValidationError(
                        '{}: tuple {} has {} codes for {} parameters'.format(
                            rwhere, list(combo), len(combo),
                            len(rule.params)))
            for name, code in zip(rule.params, combo):
                ncodes = len(params[name].labels)
                if not 0 <= code < ncodes:
                    raise ValidationError(
                            '{}: code {} out of range for parameter {!r} ({}'
                            ' codes)'.format(rwhere, code, name, ncodes))
        if len(set(rule.allowed)) != len(rule.allowed):
            raise ValidationError('{}: duplicate tuple in allowed set'.format(
                rwhere))

    # A parameter is governed by at most one combo rule anywhere, and
    # choice rules do not reach into the regions of its combo rules.
    for j, rule in enumerate(comp.combo_rules):
        for k in range(j + 1, len(comp.combo_rules)):
            other = comp.combo_rules[k]
            shared = set(rule.params) & set(other.params)
            if shared and rule.when.overlaps(other.when):
                raise ValidationError(
                        '{}: combo_rules[{}] and combo_rules[{}] overlap on'
                        ' parameter {!r}'.format(where, j, k,
                                                 sorted(shared)[0]))
        for k, choice in enumerate(comp.choice_rules):
            if choice.param in rule.params and choice.when.overlaps(
                    rule.when):
                raise ValidationError(
                        '{}: choice_rules[{}] overlaps combo_rules[{}] on'
                        ' parameter {!r}'.format(where, k, j, choice.param))

    _validate_choice_cover(comp, where)
    _validate_surrogate(catalog, comp, params, where)


def _validate_region(when, where):
    _validate_range(when.words, 'words', where)
    _validate_range(when.bits, 'bits', where)


def _cells(bounds, lo, hi):
    """Representatives of the elementary intervals that rule bounds
    cut [lo, hi] into."""
    cuts = {lo, hi + 1}
    for rlo, rhi in bounds:
        for cut in (rlo, rhi + 1):
            if lo < cut <= hi:
                cuts.add(cut)
    return sorted(cuts)[:-1]


def _validate_choice_cover(comp, where):
    for param in comp.params:
        rules = [r for r in comp.choice_rules if r.param == param.name]
        if len(rules) < 2:
            continue
        for words in _cells([r.when.words for r in rules], *comp.words_range):
            for bits in _cells([r.when.bits for r in rules],
                               *comp.bits_range):
                if not _choice_codes(comp, param.name, words, bits):
                    raise ValidationError(
                            '{}: parameter {!r} has no feasible code for'
                            ' words={} bits={}'.format(where, param.name,
                                                       words, bits))


def _validate_surrogate(catalog, comp, params, where):
    swhere = '{}: surrogate'.format(where)
    for obj in catalog.objectives:
        if obj not in comp.surrogate.base:
            raise ValidationError('{}: objective {!r} missing'.format(
                swhere, obj))
        base = comp.surrogate.base[obj]
        if len(base) != 4:
            raise ValidationError('{}: {!r} base needs 4 coefficients'.format(
                swhere, obj))
        if not np.all(np.isfinite(base)):
            raise ValidationError('{}: {!r} base coefficients must be'
                                  ' finite'.format(swhere, obj))
        c0, c1, c2, c3 = base
        for words in comp.words_range:
            for bits in comp.bits_range:
                if c0 + c1 * words * bits + c2 * words + c3 * bits <= 0.0:
                    raise ValidationError(
                            '{}: {!r} base is not positive at words={}'
                            ' bits={}'.format(swhere, obj, words, bits))
        mults = comp.surrogate.multipliers.get(obj, {})
        for name, param in params.items():
            if name not in mults:
                raise ValidationError(
                        '{}: {!r} has no multipliers for parameter {!r}'
                        .format(swhere, obj, name))
            if len(mults[name]) != len(param.labels):
                raise ValidationError(
                        '{}: {!r} needs {} multipliers for parameter {!r},'
                        ' got {}'.format(swhere, obj, len(param.labels), name,
                                         len(mults[name])))
            if any(not (m > 0.0) or not np.isfinite(m) for m in mults[name]):
                raise ValidationError(
                        '{}: {!r} multipliers for parameter {!r} must be'
                        ' positive'.format(swhere, obj, name))
        for name in mults:
            if name not in params:
                raise ValidationError(
                        '{}: {!r} has multipliers for unknown parameter {!r}'
                        .format(swhere, obj, name))
    for obj in comp.surrogate.base:
        if obj not in catalog.objectives:
            raise ValidationError('{}: unknown objective {!r}'.format(
                swhere, obj))
