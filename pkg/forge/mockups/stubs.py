import logging
from dataclasses import dataclass
from enum import Enum
from forge.constants import CustomError
from forge.frontend.c_parser import SymbolKind

log = logging.getLogger(__name__)

class StubBehavior(str, Enum):
    RETURN_ZERO = "return_zero"
    RETURN_FIXED = "return_fixed"
    ABORT_ON_CALL = "abort_on_call"

@dataclass(frozen=True)
class StubDecl:
    """
    A synthesized stand-in for a function or variable the unit only declares.

    Attributes:
        name (str): the stubbed symbol.
        signature (str): C prototype text (a declaration for variables).
        behavior (StubBehavior): what the stub does when called.
        value (str): the value returned by return_fixed stubs.
        return_type (str): the function's return type, or the variable's type.
        variable (bool): True when the stub stands for a global variable.
    """
    name: str
    signature: str
    behavior: StubBehavior
    value: str = None
    return_type: str = "int"
    variable: bool = False

def policyEntry(policy, name):
    """
    Looks a name up in a stub policy. Entries are either a behavior name or a mapping
    {"return_fixed": value}.

    Returns:
        tuple: (StubBehavior, value) or (None, None) when the policy is silent.
    """
    if not policy or name not in policy:
        return None, None
    entry = policy[name]
    if isinstance(entry, dict):
        if len(entry) != 1:
            raise CustomError("stub policy for %s must have exactly one behavior" % name)
        behavior, value = next(iter(entry.items()))
        return StubBehavior(behavior), None if value is None else str(value)
    return StubBehavior(entry), None

def stubForSymbol(symbol, policy=None):
    """
    Args:
        symbol (SymbolDecl): a declared-but-undefined function or variable.
        policy (dict, optional): per-name overrides. Defaults to None.

    Returns:
        StubDecl: the stub.
    """
    behavior, value = policyEntry(policy, symbol.name)
    variable = symbol.kind == SymbolKind.GLOBAL_VAR
    if behavior is None:
        # a zeroed pointer would only move the crash somewhere less obvious
        if symbol.returns_pointer and not variable:
            behavior = StubBehavior.ABORT_ON_CALL
        else:
            behavior = StubBehavior.RETURN_ZERO
    if variable and behavior == StubBehavior.ABORT_ON_CALL:
        log.warning("%s is a variable, abort_on_call stub becomes return_zero", symbol.name)
        behavior = StubBehavior.RETURN_ZERO
    return StubDecl(
        name=symbol.name,
        signature=symbol.signature,
        behavior=behavior,
        value=value,
        return_type=symbol.return_type or "int",
        variable=variable,
    )

def stubForUndeclared(name, policy=None):
    """Stub for a name that's called without any declaration in sight."""
    behavior, value = policyEntry(policy, name)
    return StubDecl(
        name=name,
        signature="int %s()" % name,
        behavior=behavior or StubBehavior.RETURN_ZERO,
        value=value,
    )

def renderStub(stub):
    """
    Args:
        stub (StubDecl): the stub to render.

    Returns:
        list: lines of C text.
    """
    if stub.variable:
        if stub.behavior == StubBehavior.RETURN_FIXED:
            return ["%s = %s;" % (stub.signature, stub.value)]
        return ["%s;" % stub.signature]
    lines = [stub.signature, "{"]
    if stub.behavior == StubBehavior.ABORT_ON_CALL:
        lines.append('    fprintf(stderr, "stub %s called\\n");' % stub.name)
        lines.append("    abort();")
    elif stub.return_type == "void":
        pass
    elif stub.behavior == StubBehavior.RETURN_FIXED:
        lines.append("    return (%s)(%s);" % (stub.return_type, stub.value))
    else:
        lines.append("    %s;" % declareAs(stub.return_type, "forge_ret"))
        lines.append("    memset(&forge_ret, 0, sizeof forge_ret);")
        lines.append("    return forge_ret;")
    lines.append("}")
    return lines

def declareAs(typeText, name):
    return "%s%s%s" % (typeText, "" if typeText.endswith("*") else " ", name)
