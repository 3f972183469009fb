import logging
from dataclasses import dataclass, field
from forge.constants import CustomError
from forge.frontend.c_parser import SymbolKind

log = logging.getLogger(__name__)

class TargetNotFound(CustomError):
    pass

@dataclass(frozen=True)
class SymbolGraph:
    """
    Dependency graph of one translation unit. Nodes are the unit's symbols in source
    order; an edge (a, b) means a's text mentions b.

    Attributes:
        nodes (tuple): SymbolDecl nodes in source order.
        edges (frozenset): (user, used) name pairs.
        external_unresolved (frozenset): referenced names without a definition in the
            unit that don't come from a system header.
    """
    nodes: tuple
    edges: frozenset
    external_unresolved: frozenset = frozenset()
    successorMap: dict = field(default_factory=dict, compare=False, repr=False)

    def node(self, name):
        for sym in self.nodes:
            if sym.name == name:
                return sym
        return None

    def successors(self, name):
        return self.successorMap.get(name, [])

def resolveName(name, byName, enumerators):
    if name in byName:
        return name
    owner = enumerators.get(name)
    if owner in byName:
        return owner
    return None

def build_graph(unit):
    """
    Builds the dependency graph of a parsed unit.

    Args:
        unit (TranslationUnit): output of parse_unit.

    Returns:
        SymbolGraph: the graph.
    """
    byName = {sym.name: sym for sym in unit.symbols}
    order = {sym.name: i for i, sym in enumerate(unit.symbols)}
    edges = set()
    successorMap = {}
    unresolved = set()
    for sym in unit.symbols:
        succ = []
        for ref in sym.references:
            target = resolveName(ref, byName, unit.enumerators)
            if target is None:
                # tags and system names are never stubbed
                if ref not in unit.system_names and " " not in ref:
                    unresolved.add(ref)
                continue
            if target == sym.name or (sym.name, target) in edges:
                continue
            edges.add((sym.name, target))
            succ.append(target)
        successorMap[sym.name] = sorted(succ, key=order.get)
    # declared here, defined in another unit
    for sym in unit.symbols:
        if sym.kind in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR) and not sym.defined \
                and sym.name not in unit.system_names:
            unresolved.add(sym.name)
    log.debug("%s: %d symbols, %d edges, %d unresolved",
              unit.path, len(unit.symbols), len(edges), len(unresolved))
    return SymbolGraph(
        nodes=tuple(unit.symbols),
        edges=frozenset(edges),
        external_unresolved=frozenset(unresolved),
        successorMap=successorMap,
    )

def closureGroups(graph, target):
    """
    Strongly connected components of the part of the graph reachable from target,
    dependencies first. Members of a component are in source order.

    Args:
        graph (SymbolGraph): a unit's graph.
        target (str): name of a function node.

    Raises:
        TargetNotFound: target isn't a function of the unit.

    Returns:
        list: lists of SymbolDecl, one per component.
    """
    root = graph.node(target)
    if root is None or root.kind != SymbolKind.FUNCTION:
        raise TargetNotFound("no function named %s" % target)
    order = {sym.name: i for i, sym in enumerate(graph.nodes)}
    # iterative tarjan, a deep call chain must not hit the recursion limit
    index = {target: 0}
    low = {target: 0}
    stack = [target]
    onStack = {target}
    counter = 1
    work = [(target, iter(graph.successors(target)))]
    groups = []
    while work:
        name, successors = work[-1]
        descended = False
        for succ in successors:
            if succ not in index:
                index[succ] = low[succ] = counter
                counter += 1
                stack.append(succ)
                onStack.add(succ)
                work.append((succ, iter(graph.successors(succ))))
                descended = True
                break
            if succ in onStack:
                low[name] = min(low[name], index[succ])
        if descended:
            continue
        work.pop()
        if work:
            parent = work[-1][0]
            low[parent] = min(low[parent], low[name])
        if low[name] == index[name]:
            group = []
            while True:
                member = stack.pop()
                onStack.discard(member)
                group.append(member)
                if member == name:
                    break
            groups.append(sorted(group, key=order.get))
    return [[graph.node(member) for member in group] for group in groups]

def implied_closure(graph, target):
    """
    Everything a target function needs to compile, ordered so each symbol comes after
    what it depends on. Mutually recursive symbols end up next to each other.

    Args:
        graph (SymbolGraph): a unit's graph.
        target (str): name of a function node.

    Raises:
        TargetNotFound: target isn't a function of the unit.

    Returns:
        list: SymbolDecl entries, target included.
    """
    closure = []
    for group in closureGroups(graph, target):
        closure += group
    return closure
