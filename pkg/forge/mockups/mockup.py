"""
Builds a mockup: the smallest self-contained C file that compiles one target function.

The mockup is stitched together from lines of the original sources, found through the
unit's linemarkers, so every copied line maps back to exactly one (file, line) and reads
the same there, apart from dropped static and inline words. User macro definitions are
copied ahead of the code that uses them. When an original file can't be read the
preprocessed text stands in. Anything the generator writes itself (includes, defines,
stubs, prototypes) maps to SYNTHESIZED.
"""
import json
import logging
import os
import re
from dataclasses import dataclass, field
from forge.constants import CustomError, PRELUDE_INCLUDES, SYNTHESIZED
from forge.externals.iterable_utils import uniqueInOrder
from forge.frontend.c_parser import SymbolKind
from forge.mockups.stubs import renderStub, stubForSymbol, stubForUndeclared

log = logging.getLogger(__name__)

HEAD_END = re.compile(r"[(=;{\[]")
# literals, comments and member accesses pass through renaming untouched
RENAMABLE = re.compile(
    r"/\*.*?(?:\*/|$)|//.*"
    r"|\"(?:[^\"\\]|\\.)*\"?|'(?:[^'\\]|\\.)*'?"
    r"|\b\d[\w.]*"
    r"|(?:->|\.)\s*[A-Za-z_]\w*"
    r"|([A-Za-z_]\w*)"
)

class EmitCollision(CustomError):
    pass

class LineOutOfRange(CustomError):
    pass

class SynthesizedLine(CustomError):
    pass

@dataclass(frozen=True)
class MockupUnit:
    """
    Attributes:
        target (str): the function under test.
        source_text (str): the mockup C text.
        source_map (dict): emitted line -> (file, line), copied lines only.
        stubs (tuple): StubDecl for every synthesized stub.
        exposed (tuple): names of formerly static symbols, after renaming.
        renames (dict): original name -> emitted name for exposed symbols that would
            collide with system header names.
        entry (SymbolDecl): the target's declaration.
        unit_path (str): the unit the mockup was cut from.
    """
    target: str
    source_text: str
    source_map: dict
    stubs: tuple = ()
    exposed: tuple = ()
    renames: dict = field(default_factory=dict)
    entry: object = None
    unit_path: str = ""

    @property
    def lineCount(self):
        return self.source_text.count("\n")

    @property
    def entryName(self):
        return self.renames.get(self.target, self.target)

    def mappedLines(self):
        return sorted(self.source_map)

@dataclass(frozen=True)
class Edit:
    file: str
    line: int
    text: str

@dataclass(frozen=True)
class EditScript:
    """Comment insertions into original files, last line first within each file."""
    edits: tuple = ()

    def merge(self, other):
        combined = list(self.edits) + list(other.edits)
        combined.sort(key=lambda edit: (edit.file, -edit.line))
        return EditScript(tuple(combined))

    def __len__(self):
        return len(self.edits)

class MockupWriter(object):
    def __init__(self, renames):
        self.lines = []
        self.origins = []
        self.renames = renames

    def renamed(self, match):
        name = match.group(1)
        if name is None:
            return match.group(0)
        return self.renames.get(name, name)

    def add(self, text, origin=None, rename=True):
        if rename and self.renames:
            text = RENAMABLE.sub(self.renamed, text)
        self.lines.append(text)
        self.origins.append(origin)

    def addBlock(self, lines):
        for text in lines:
            self.add(text)

    def text(self):
        return "\n".join(self.lines) + "\n"

    def sourceMap(self):
        return {i + 1: origin for i, origin in enumerate(self.origins) if origin is not None}

def stripHead(texts, pattern):
    """
    Removes words matching pattern from the declaration head, the text before the first
    "(", "=", ";", "{" or "[". Bodies and initializers are never touched.
    """
    result = []
    inHead = True
    for text in texts:
        if not inHead:
            result.append(text)
            continue
        cut = HEAD_END.search(text)
        if cut is None:
            result.append(pattern.sub("", text))
            continue
        result.append(pattern.sub("", text[:cut.start()]) + text[cut.start():])
        inHead = False
    return result

def exposureRenames(closure, unit):
    """
    Picks new names for static symbols that would clash with system header names once
    they're made external.

    Raises:
        EmitCollision: the new name is taken as well.
    """
    stem = re.sub(r"\W", "_", os.path.splitext(os.path.basename(unit.path))[0])
    taken = {sym.name for sym in unit.symbols} | set(unit.system_names)
    renames = {}
    for sym in closure:
        if not sym.isStatic or sym.kind not in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR):
            continue
        if sym.name not in unit.system_names:
            continue
        newName = "%s__%s" % (sym.name, stem)
        if newName in taken:
            raise EmitCollision("cannot expose static %s: %s is taken too" % (sym.name, newName))
        log.info("exposing static %s as %s", sym.name, newName)
        renames[sym.name] = newName
    return renames

def forwardDeclarations(closure):
    """
    Declarations needed ahead of symbols that use something defined later, which only
    happens inside mutually recursive groups.

    Returns:
        dict: symbol name -> declarations to emit right before that symbol.
    """
    position = {sym.name: i for i, sym in enumerate(closure)}
    firstUser = {}
    for i, sym in enumerate(closure):
        for ref in sym.references:
            j = position.get(ref)
            if j is None or j <= i:
                continue
            used = closure[j]
            if used.kind in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR) and ref not in firstUser:
                firstUser[ref] = i
    declarations = {}
    for ref in sorted(firstUser, key=position.get):
        used = closure[position[ref]]
        text = used.signature + ";"
        if used.kind == SymbolKind.GLOBAL_VAR:
            text = "extern " + text
        declarations.setdefault(closure[firstUser[ref]].name, []).append(text)
    return declarations

def readOriginal(path, cache):
    """Lines of an original source file, or None when it can't be read."""
    if path not in cache:
        try:
            with open(path, "r", encoding="utf-8", errors="replace") as infile:
                cache[path] = [line.rstrip("\r") for line in infile.read().split("\n")]
        except OSError:
            cache[path] = None
    return cache[path]

def originalBlock(origins, cache):
    """
    The original lines behind a symbol's span, each with its (file, line). None when the
    span crosses files, the file is gone, or the block would cut a comment in half.
    """
    files = {origin[0] for origin in origins}
    if len(files) != 1:
        return None
    path = files.pop()
    source = readOriginal(path, cache)
    first = min(origin[1] for origin in origins)
    last = max(origin[1] for origin in origins)
    if source is None or last > len(source):
        return None
    block = source[first - 1:last]
    joined = "\n".join(block)
    opens, closes = joined.find("/*"), joined.find("*/")
    if closes != -1 and (opens == -1 or closes < opens):
        return None
    if joined.rfind("/*") > joined.rfind("*/"):
        return None
    return [(text, (path, first + k)) for k, text in enumerate(block)]

def macroLines(unit, cache):
    """
    The unit's user macro directives as (text, origin) pairs, continuation lines
    included. Directives whose file can't be read keep their preprocessed text and no
    origin.
    """
    result = []
    for text, (path, line) in unit.macros:
        source = readOriginal(path, cache)
        if source is None or line > len(source) or not source[line - 1].lstrip().startswith("#"):
            result.append((text, None))
            continue
        while True:
            result.append((source[line - 1], (path, line)))
            if not source[line - 1].endswith("\\") or line >= len(source):
                break
            line += 1
    return result

def generate_mockup(closure, unit, unresolved, stub_policy=None, target=None, prelude=None):
    """
    Emits the mockup of a target function.

    Args:
        closure (list): implied_closure of the target.
        unit (TranslationUnit): the unit the closure was taken from.
        unresolved (set): the graph's external_unresolved names.
        stub_policy (dict, optional): per-name stub behaviors. Defaults to None.
        target (str, optional): the target's name. Defaults to the last closure symbol.
        prelude (list, optional): headers always included. Defaults to PRELUDE_INCLUDES.

    Raises:
        EmitCollision: an exposed static can't be given a unique name.

    Returns:
        MockupUnit: the mockup.
    """
    if not closure:
        raise CustomError("empty closure")
    target = target or closure[-1].name
    entry = next((sym for sym in closure if sym.name == target), None)
    if entry is None:
        raise CustomError("%s is not part of its own closure" % target)
    renames = exposureRenames(closure, unit)
    writer = MockupWriter(renames)
    writer.add("/* mockup of %s from %s, generated by legacy-forge */"
               % (target, os.path.basename(unit.path)), rename=False)
    # step 1: headers
    for header in uniqueInOrder(list(prelude or PRELUDE_INCLUDES) + list(unit.system_includes)):
        writer.add("#include <%s>" % header, rename=False)
    cache = {}
    copied = set()
    if unit.macros_retained:
        # step 1b: macros the copied text may use
        for define in unit.defines:
            name, _, value = define.partition("=")
            writer.add("#define %s %s" % (name, value or "1"), rename=False)
        for text, origin in macroLines(unit, cache):
            if origin is not None:
                if origin in copied:
                    continue
                copied.add(origin)
            writer.add(text, origin)
    # step 2: names nothing declares
    undeclared = []
    for sym in closure:
        undeclared += [
            ref for ref in sym.references
            if ref in unresolved and unit.symbol(ref) is None and ref not in unit.enumerators
        ]
    stubs = []
    for name in uniqueInOrder(undeclared):
        stub = stubForUndeclared(name, stub_policy)
        stubs.append(stub)
        writer.addBlock(renderStub(stub))
    # step 3: the closure itself
    lines = unit.lines
    declarations = forwardDeclarations(closure)
    staticWords = re.compile(r"\b(?:static|inline)\b\s*")
    inlineWord = re.compile(r"\binline\b\s*")
    emittedSpans = set()
    for sym in closure:
        writer.addBlock(declarations.get(sym.name, []))
        declaredOnly = sym.kind in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR) and not sym.defined
        if declaredOnly and sym.name not in unit.system_names:
            stub = stubForSymbol(sym, stub_policy)
            stubs.append(stub)
            writer.addBlock(renderStub(stub))
            continue
        if sym.span in emittedSpans:
            continue
        emittedSpans.add(sym.span)
        numbers = [i for i in range(sym.span[0], sym.span[1] + 1) if unit.origin(i) is not None]
        block = originalBlock([unit.origin(i) for i in numbers], cache) if unit.macros_retained and numbers else None
        if block is None:
            block = [(lines[i - 1], unit.origin(i)) for i in numbers]
        else:
            block = [(text, origin) for text, origin in block if origin not in copied]
            copied.update(origin for _, origin in block)
        texts = [text for text, _ in block]
        if sym.kind in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR):
            texts = stripHead(texts, staticWords if sym.isStatic else inlineWord)
        # member names inside type bodies keep their spelling
        typeBody = sym.kind in (SymbolKind.TYPEDEF, SymbolKind.STRUCT_UNION_ENUM)
        for (_, origin), text in zip(block, texts):
            writer.add(text, origin, rename=not typeBody)
    exposed = tuple(
        renames.get(sym.name, sym.name) for sym in closure
        if sym.isStatic and sym.kind in (SymbolKind.FUNCTION, SymbolKind.GLOBAL_VAR)
    )
    mockup = MockupUnit(
        target=target,
        source_text=writer.text(),
        source_map=writer.sourceMap(),
        stubs=tuple(stubs),
        exposed=exposed,
        renames=renames,
        entry=entry,
        unit_path=unit.path,
    )
    log.info("mockup of %s: %d lines, %d stubs, %d exposed",
             target, mockup.lineCount, len(stubs), len(exposed))
    return mockup

def map_back(mockup, emitted_line):
    """
    Args:
        mockup (MockupUnit): a mockup.
        emitted_line (int): 1-based line of the mockup text.

    Raises:
        LineOutOfRange: the line isn't part of the mockup.

    Returns:
        tuple | str: (file, line) for copied lines, SYNTHESIZED otherwise.
    """
    if not 1 <= emitted_line <= mockup.lineCount:
        raise LineOutOfRange("line %d outside mockup of %d lines" % (emitted_line, mockup.lineCount))
    return mockup.source_map.get(emitted_line, SYNTHESIZED)

def annotate_original(mockup, emitted_line, note):
    """
    Builds the edit that puts a comment above the original line an emitted line came
    from.

    Raises:
        LineOutOfRange: the line isn't part of the mockup.
        SynthesizedLine: the line was written by the generator and has no original.

    Returns:
        EditScript: the edit.
    """
    location = map_back(mockup, emitted_line)
    if location == SYNTHESIZED:
        raise SynthesizedLine("line %d of the %s mockup has no original" % (emitted_line, mockup.target))
    file, line = location
    return EditScript((Edit(file, line, note),))

def annotate_many(mockup, notes):
    """Merges annotate_original over (emitted_line, note) pairs, skipping synthesized lines."""
    script = EditScript()
    for emittedLine, note in notes:
        try:
            script = script.merge(annotate_original(mockup, emittedLine, note))
        except SynthesizedLine:
            log.warning("note on synthesized line %d of %s dropped", emittedLine, mockup.target)
    return script

def apply_edits(script):
    """
    Inserts the script's comments into the original files, matching the indentation of
    the line each comment describes.

    Returns:
        list: the files that were modified.
    """
    byFile = {}
    for edit in script.edits:
        byFile.setdefault(edit.file, []).append(edit)
    for file, edits in byFile.items():
        with open(file, "r", encoding="utf-8") as infile:
            lines = infile.read().split("\n")
        for edit in sorted(edits, key=lambda e: -e.line):
            index = min(max(edit.line - 1, 0), len(lines))
            anchor = lines[index] if index < len(lines) else ""
            indent = anchor[:len(anchor) - len(anchor.lstrip())]
            note = edit.text if edit.text.lstrip().startswith(("//", "/*")) else "// " + edit.text
            lines.insert(index, indent + note)
        with open(file, "w", encoding="utf-8") as outfile:
            outfile.write("\n".join(lines))
        log.info("annotated %s with %d notes", file, len(edits))
    return list(byFile)

def write_mockup(mockup, directory):
    """
    Writes <target>_mockup.c and its source map next to it.

    Returns:
        tuple: (mockup path, source map path)
    """
    os.makedirs(directory, exist_ok=True)
    sourcePath = os.path.join(directory, "%s_mockup.c" % mockup.target)
    mapPath = os.path.join(directory, "%s_mockup.map.json" % mockup.target)
    with open(sourcePath, "w", encoding="utf-8") as outfile:
        outfile.write(mockup.source_text)
    entries = [
        {"emitted_line": line, "file": origin[0], "line": origin[1]}
        for line, origin in sorted(mockup.source_map.items())
    ]
    with open(mapPath, "w", encoding="utf-8") as outfile:
        json.dump({"target": mockup.target, "renames": mockup.renames, "map": entries},
                  outfile, indent=2, sort_keys=True)
    return sourcePath, mapPath
