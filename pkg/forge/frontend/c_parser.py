"""
Turns a C source file into a TranslationUnit: a list of top-level symbols with their
spans in the preprocessed text, the names each of them references, and enough
signature detail to stub or drive them later.

The text is preprocessed by an external C preprocessor first. Regions that come from
system headers stay in ``preprocessed_text`` but are blanked before parsing; only their
typedef names are handed to the parser so user code mentioning ``size_t`` or ``FILE``
still parses.
"""
import copy
import logging
import os
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pycparser import c_ast, c_generator, c_parser
from pycparser.c_parser import ParseError
from forge.constants import CustomError, PREPROCESSOR, PREPROCESSOR_DEFINES
from forge.externals.iterable_utils import uniqueInOrder
from forge.externals.process_utils import runBounded

log = logging.getLogger(__name__)

LINEMARKER = re.compile(r'^#\s*(?:line\s+)?(\d+)\s+"((?:[^"\\]|\\.)*)"\s*([\d\s]*)$')
IDENTIFIER = re.compile(r"\b[A-Za-z_]\w*\b")
MACRO_DIRECTIVE = re.compile(r"^\s*#\s*(?:define|undef)\b")
SYSTEM_INCLUDE = re.compile(r"^\s*#\s*include\s*<([^>]+)>", re.MULTILINE)
PARSE_ERROR_LINE = re.compile(r":(\d+):(?:\d+:)?")
# names in IdentifierType that aren't typedef references
TYPE_KEYWORDS = {
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned",
    "_Bool", "_Complex", "__int128",
}
BUILTIN_NAMES = {"__func__", "__FUNCTION__", "__PRETTY_FUNCTION__"}
ASM_NAMES = {"asm", "__asm", "__asm__"}

class PreprocessFailed(CustomError):
    def __init__(self, stderr):
        super().__init__("C preprocessor failed:\n" + stderr)
        self.stderr = stderr

class ParseFailed(CustomError):
    def __init__(self, line, message):
        super().__init__("line %s: %s" % (line, message))
        self.line = line
        self.message = message

class SymbolKind(str, Enum):
    FUNCTION = "function"
    GLOBAL_VAR = "global_var"
    TYPEDEF = "typedef"
    STRUCT_UNION_ENUM = "struct_union_enum"
    MACRO_RESIDUE = "macro_residue"

class Storage(str, Enum):
    STATIC_INTERNAL = "static_internal"
    EXTERNAL = "external"

@dataclass(frozen=True)
class ParamSpec:
    name: str
    type_text: str
    # scalar, pointer, array, function_pointer, ellipsis
    shape: str

@dataclass(frozen=True)
class SymbolDecl:
    name: str
    kind: SymbolKind
    storage: Storage
    span: tuple
    references: tuple = ()
    defined: bool = True
    origin: tuple = None
    signature: str = ""
    return_type: str = ""
    returns_pointer: bool = False
    params: tuple = ()
    redeclarations: tuple = ()

    @property
    def isStatic(self):
        return self.storage == Storage.STATIC_INTERNAL

@dataclass(frozen=True)
class TranslationUnit:
    path: str
    symbols: tuple
    preprocessed_text: str
    line_origins: tuple = ()
    system_names: frozenset = frozenset()
    system_includes: tuple = ()
    enumerators: dict = field(default_factory=dict, compare=False)
    # (text, (file, line)) of every user #define and #undef, in order
    macros: tuple = ()
    defines: tuple = ()
    macros_retained: bool = False

    def symbol(self, name):
        for sym in self.symbols:
            if sym.name == name:
                return sym
        return None

    @property
    def lines(self):
        return self.preprocessed_text.split("\n")

    def origin(self, line):
        """Original (file, line) of a 1-based preprocessed line, or None."""
        if 1 <= line <= len(self.line_origins):
            return self.line_origins[line - 1]
        return None

def parse_unit(source_path, include_dirs=(), defines=(), preprocessor=None):
    """Preprocesses and parses one C source file.

    Args:
        source_path (str): path of the .c file. A .i file is taken as already
            preprocessed and read as-is.
        include_dirs (list, optional): extra -I directories. Defaults to ().
        defines (list, optional): macro definitions, "NAME" or "NAME=VALUE". Defaults
            to ().
        preprocessor (list, optional): preprocessor command line. Defaults to
            PREPROCESSOR.

    Raises:
        PreprocessFailed: the preprocessor is missing or exited nonzero.
        ParseFailed: the text is outside the supported C subset.

    Returns:
        TranslationUnit: the parsed unit.
    """
    if not os.path.isfile(source_path):
        raise PreprocessFailed("no such file: %s" % source_path)
    if source_path.endswith(".i"):
        with open(source_path, "r", encoding="utf-8", errors="replace") as infile:
            return parsePreprocessed(infile.read(), source_path)
    command = list(preprocessor or PREPROCESSOR)
    # keep #define lines so mockups can copy original text that uses them
    if "-dD" not in command:
        command.append("-dD")
    command += ["-I" + d for d in include_dirs]
    command += ["-D" + d for d in list(PREPROCESSOR_DEFINES) + list(defines)]
    command.append(source_path)
    try:
        result = runBounded(command)
    except OSError as err:
        raise PreprocessFailed("cannot run %s: %s" % (command[0], err))
    if result.returncode != 0:
        raise PreprocessFailed(result.stderr)
    unit = parsePreprocessed(result.stdout, source_path, macros_retained=True)
    return replace(unit, defines=tuple(defines))

def parsePreprocessed(text, path, macros_retained=None):
    """
    Parses preprocessed text into a TranslationUnit. This is the part of parse_unit
    that runs after the external preprocessor.

    Args:
        text (str): preprocessor output, linemarkers included.
        path (str): the file the text came from.
        macros_retained (bool, optional): whether the text keeps the user's #define
            lines. Defaults to whether any turned up.

    Raises:
        ParseFailed: syntax outside the supported subset, K&R definitions, inline
            assembly.

    Returns:
        TranslationUnit: the parsed unit.
    """
    lines = text.split("\n")
    origins, userView, systemLines, userFiles, macros = splitRegions(lines, path)
    systemText = "\n".join(systemLines)
    typedefNames = scanTypedefNames(systemText)
    # a single prelude line keeps parser line numbers one above the preprocessed ones
    prelude = " ".join("typedef int %s;" % name for name in sorted(typedefNames))
    parserInput = prelude + "\n" + "\n".join(userView)
    try:
        ast = c_parser.CParser().parse(parserInput, filename=path)
    except ParseError as err:
        raise ParseFailed(originalLine(err, origins), str(err))
    builder = SymbolTableBuilder(lines, userView, origins)
    for node in ast.ext:
        if node.coord is not None and node.coord.line <= 1:
            continue  # prelude
        builder.add(node)
    symbols = builder.finish()
    return TranslationUnit(
        path=path,
        symbols=tuple(symbols),
        preprocessed_text=text,
        line_origins=tuple(origins),
        system_names=frozenset(IDENTIFIER.findall(systemText)),
        system_includes=tuple(scanSystemIncludes(userFiles)),
        enumerators=dict(builder.enumerators),
        macros=tuple(macros),
        macros_retained=bool(macros) if macros_retained is None else macros_retained,
    )

def splitRegions(lines, path):
    """
    Walks the linemarkers of preprocessed text and separates user code from system
    header code.

    Args:
        lines (list): preprocessed lines.
        path (str): the unit's own file, assumed until a linemarker says otherwise.

    Returns:
        tuple: (origins, userView, systemLines, userFiles, macros) where origins holds the
        original (file, line) of every user line (None elsewhere), userView is the
        text handed to the parser (system lines and directives blanked), systemLines
        the system header text, userFiles the user files seen, in order, and macros
        the (text, origin) of every user macro directive.
    """
    origins = []
    userView = []
    systemLines = []
    userFiles = []
    macros = []
    currentFile = path
    currentLine = 1
    isSystem = False
    for line in lines:
        marker = LINEMARKER.match(line)
        if marker:
            currentFile = marker.group(2)
            currentLine = int(marker.group(1))
            flags = marker.group(3).split()
            # gcc also tags expanded system macros with flag 3 inside user files
            isSystem = currentFile.startswith("<") or (
                "3" in flags and currentFile != path and currentFile not in userFiles
            )
            if not isSystem and currentFile not in userFiles:
                userFiles.append(currentFile)
            origins.append(None)
            userView.append("")
            continue
        if isSystem:
            origins.append(None)
            userView.append("")
            if not MACRO_DIRECTIVE.match(line):
                systemLines.append(line)
        else:
            origins.append((currentFile, currentLine))
            stripped = line.lstrip()
            # pragmas are understood by the parser, any other directive is noise
            if stripped.startswith("#") and not stripped.startswith("#pragma"):
                userView.append("")
                if MACRO_DIRECTIVE.match(line):
                    macros.append((line, (currentFile, currentLine)))
            else:
                userView.append(line)
        currentLine += 1
    if path not in userFiles:
        userFiles.insert(0, path)
    return origins, userView, systemLines, userFiles, macros

def originalLine(err, origins):
    match = PARSE_ERROR_LINE.search(str(err))
    if not match:
        return "?"
    line = int(match.group(1)) - 1
    if 1 <= line <= len(origins) and origins[line - 1] is not None:
        return "%s:%d" % origins[line - 1]
    return str(line)

def scanSystemIncludes(userFiles):
    """Collects the <...> headers the user files include, in first-seen order."""
    headers = []
    for name in userFiles:
        if not os.path.isfile(name):
            continue
        with open(name, "r", encoding="utf-8", errors="replace") as infile:
            headers += SYSTEM_INCLUDE.findall(infile.read())
    return uniqueInOrder(h.strip() for h in headers)

def splitTopLevel(text, separator):
    """Splits text at separator characters that sit outside (), [] and {}."""
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == separator and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts

def statementTail(text, start):
    """Text from start up to the first semicolon outside (), [] and {}."""
    depth = 0
    for i in range(start, len(text)):
        ch = text[i]
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == ";" and depth <= 0:
            return text[start:i]
    return text[start:]

def scanTypedefNames(systemText):
    """
    Finds the names declared by typedef statements in system header text. It's a
    lexical scan, not a parse: good enough to tell the C parser which identifiers are
    type names.

    Args:
        systemText (str): preprocessed system header text.

    Returns:
        set: typedef names.
    """
    names = set()
    for keyword in re.finditer(r"\btypedef\b", systemText):
        body = statementTail(systemText, keyword.end())
        # drop a struct/union/enum body, keep the declarators after it
        lastBrace = body.rfind("}")
        if lastBrace != -1:
            body = body[lastBrace + 1:]
        for declarator in splitTopLevel(body, ","):
            pointerName = re.search(r"\(\s*\*\s*([A-Za-z_]\w*)", declarator)
            if pointerName:
                names.add(pointerName.group(1))
                continue
            declarator = re.sub(r"(\[[^\]]*\]\s*)+$", "", declarator.strip())
            declarator = re.sub(r"\(.*\)\s*$", "", declarator).strip()
            identifiers = IDENTIFIER.findall(declarator)
            if identifiers and identifiers[-1] not in TYPE_KEYWORDS:
                names.add(identifiers[-1])
    return names

def findSpanEnd(lines, start, functionDefinition):
    """
    Finds the last line of a top-level declaration: the closing brace of a function
    body, or the terminating semicolon of anything else.

    Args:
        lines (list): preprocessed lines.
        start (int): 1-based first line of the declaration.
        functionDefinition (bool): whether the declaration is a function definition.

    Returns:
        int: 1-based last line.
    """
    depth = 0
    opened = False
    quote = None
    for idx in range(start - 1, len(lines)):
        line = lines[idx]
        escaped = False
        for ch in line:
            if quote:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == quote:
                    quote = None
                continue
            if ch in "\"'":
                quote = ch
            elif ch in "([{":
                depth += 1
                if ch == "{":
                    opened = True
            elif ch in ")]}":
                depth -= 1
                if ch == "}" and depth == 0 and functionDefinition and opened:
                    return idx + 1
            elif ch == ";" and depth == 0 and not functionDefinition:
                return idx + 1
        quote = None
    return len(lines)

def renameDeclarator(typeNode, name):
    node = copy.deepcopy(typeNode)
    inner = node
    while not isinstance(inner, c_ast.TypeDecl) and hasattr(inner, "type"):
        inner = inner.type
    if isinstance(inner, c_ast.TypeDecl):
        inner.declname = name
    return node

def typeText(typeNode, name=None):
    """Renders a type node, e.g. "char *", or "char *buf" when a name is given."""
    node = renameDeclarator(typeNode, name)
    typename = c_ast.Typename(name=None, quals=[], align=None, type=node)
    return c_generator.CGenerator().visit(typename).strip()

def declarationText(decl, name=None):
    """Renders a declaration with storage, function specifiers and initializer removed."""
    node = copy.deepcopy(decl)
    node.storage = []
    node.funcspec = []
    node.init = None
    node.bitsize = None
    if name is not None:
        node.name = name
        node.type = renameDeclarator(node.type, name)
    return c_generator.CGenerator().visit(node).strip()

def paramSpecs(funcDecl):
    """
    Describes the parameters of a function declarator. Unnamed parameters are named
    argN so the specs can be used to write definitions.

    Args:
        funcDecl (c_ast.FuncDecl): a function declarator.

    Returns:
        tuple: (list of ParamSpec, list of named parameter declarations as text)
    """
    specs = []
    texts = []
    params = funcDecl.args.params if funcDecl.args else []
    for i, param in enumerate(params):
        if isinstance(param, c_ast.EllipsisParam):
            specs.append(ParamSpec("...", "...", "ellipsis"))
            texts.append("...")
            continue
        paramType = param.type
        if isinstance(param, c_ast.Typename) and isinstance(paramType, c_ast.TypeDecl) \
                and isinstance(paramType.type, c_ast.IdentifierType) \
                and paramType.type.names == ["void"]:
            # f(void)
            return [], ["void"]
        name = getattr(param, "name", None) or "arg%d" % i
        if isinstance(paramType, c_ast.PtrDecl):
            shape = "function_pointer" if isinstance(paramType.type, c_ast.FuncDecl) else "pointer"
            text = typeText(paramType)
        elif isinstance(paramType, c_ast.ArrayDecl):
            shape = "array"
            text = typeText(paramType.type) + " *"
        else:
            shape = "scalar"
            text = typeText(paramType)
        specs.append(ParamSpec(name, text, shape))
        texts.append(typeText(paramType, name))
    return specs, texts

def functionSignature(decl):
    """Prototype text of a function Decl with every parameter named and no storage."""
    funcDecl = decl.type
    returnType = typeText(funcDecl.type)
    _, paramTexts = paramSpecs(funcDecl)
    if not paramTexts:
        paramTexts = [] if funcDecl.args is None else ["void"]
    separator = "" if returnType.endswith("*") else " "
    return "%s%s%s(%s)" % (returnType, separator, decl.name, ", ".join(paramTexts))

class ReferenceCollector(c_ast.NodeVisitor):
    """
    Gathers identifier names mentioned by a declaration, in first-seen order, along with
    the names it declares locally (parameters, block-scope variables).
    """

    def __init__(self):
        self.names = []
        self.locals = set()

    def visit_ID(self, node):
        self.names.append(node.name)

    def visit_StructRef(self, node):
        # the field is a member name, not a reference
        self.visit(node.name)

    def visit_NamedInitializer(self, node):
        self.visit(node.expr)

    def visit_IdentifierType(self, node):
        for name in node.names:
            if name not in TYPE_KEYWORDS:
                self.names.append(name)

    def visit_Struct(self, node):
        self.tagged("struct", node)

    def visit_Union(self, node):
        self.tagged("union", node)

    def visit_Enum(self, node):
        self.tagged("enum", node)

    def tagged(self, keyword, node):
        if node.name:
            self.names.append("%s %s" % (keyword, node.name))
        self.generic_visit(node)

    def visit_Enumerator(self, node):
        self.locals.add(node.name)
        if node.value is not None:
            self.visit(node.value)

    def visit_Decl(self, node):
        if node.name:
            self.locals.add(node.name)
        self.generic_visit(node)

    def visit_Typedef(self, node):
        self.locals.add(node.name)
        self.generic_visit(node)

def innerTagged(typeNode):
    """Returns the Struct/Union/Enum node a type is built on, if any."""
    node = typeNode
    while node is not None and not isinstance(node, (c_ast.Struct, c_ast.Union, c_ast.Enum)):
        node = getattr(node, "type", None)
    return node

def tagName(node):
    keyword = {c_ast.Struct: "struct", c_ast.Union: "union", c_ast.Enum: "enum"}[type(node)]
    return "%s %s" % (keyword, node.name)

def definesBody(node):
    if isinstance(node, c_ast.Enum):
        return node.values is not None
    return node.decls is not None

class SymbolTableBuilder(object):
    def __init__(self, lines, userView, origins):
        """
        Accumulates symbols from the parser's top-level nodes, working out each node's
        span in the preprocessed text.

        Args:
            lines (list): preprocessed lines.
            userView (list): the lines handed to the parser.
            origins (list): original (file, line) per preprocessed line.
        """
        self.lines = lines
        self.userView = userView
        self.origins = origins
        self.order = []
        self.byName = {}
        self.raw = {}
        self.enumerators = {}
        self.prevStart = 0
        self.prevEnd = 0
        self.residueCount = 0

    def spanFor(self, node, functionDefinition):
        coordLine = node.coord.line - 1 if node.coord else self.prevEnd + 1
        if coordLine <= self.prevEnd:
            # another declarator of the statement we just consumed
            return (self.prevStart, self.prevEnd)
        start = coordLine
        for idx in range(self.prevEnd + 1, coordLine + 1):
            if self.userView[idx - 1].strip():
                start = idx
                break
        end = findSpanEnd(self.userView, start, functionDefinition)
        self.prevStart, self.prevEnd = start, end
        return (start, end)

    def originFor(self, span):
        inside = [self.origins[i - 1] for i in range(span[0], span[1] + 1)
                  if self.origins[i - 1] is not None]
        if not inside:
            return None
        return (inside[0][0], inside[0][1], inside[-1][1])

    def add(self, node):
        if isinstance(node, c_ast.FuncDef):
            self.addFunctionDefinition(node)
        elif isinstance(node, c_ast.Decl):
            self.addDecl(node)
        elif isinstance(node, c_ast.Typedef):
            self.addTypedef(node)
        else:
            self.addResidue(node)

    def addFunctionDefinition(self, node):
        if node.param_decls:
            raise ParseFailed(self.describe(node), "K&R-style definition of %s" % node.decl.name)
        span = self.spanFor(node, True)
        collector = ReferenceCollector()
        collector.visit(node)
        self.record(self.functionSymbol(node.decl, span, True), collector)

    def functionSymbol(self, decl, span, defined):
        funcDecl = decl.type
        specs, _ = paramSpecs(funcDecl)
        return SymbolDecl(
            name=decl.name,
            kind=SymbolKind.FUNCTION,
            storage=Storage.STATIC_INTERNAL if "static" in decl.storage else Storage.EXTERNAL,
            span=span,
            defined=defined,
            origin=self.originFor(span),
            signature=functionSignature(decl),
            return_type=typeText(funcDecl.type),
            returns_pointer=isinstance(funcDecl.type, c_ast.PtrDecl),
            params=tuple(specs),
        )

    def addDecl(self, node):
        span = self.spanFor(node, False)
        collector = ReferenceCollector()
        collector.visit(node)
        if isinstance(node.type, c_ast.FuncDecl):
            self.record(self.functionSymbol(node, span, False), collector)
        elif node.name is None:
            tagged = innerTagged(node.type)
            if tagged is None or (not tagged.name and not isinstance(tagged, c_ast.Enum)):
                self.addResidue(node, span)
            elif not tagged.name:
                # enum { A, B }; owns its enumerators under a synthetic name
                self.addInlineTags(node.type, span, "enum <anonymous:%d>" % span[0])
            elif definesBody(tagged):
                self.addInlineTags(node.type, span, None)
            else:
                self.record(SymbolDecl(
                    name=tagName(tagged),
                    kind=SymbolKind.STRUCT_UNION_ENUM,
                    storage=Storage.EXTERNAL,
                    span=span,
                    defined=False,
                    origin=self.originFor(span),
                ), ReferenceCollector())
        else:
            self.addInlineTags(node.type, span, node.name)
            isExtern = "extern" in node.storage and node.init is None
            self.record(SymbolDecl(
                name=node.name,
                kind=SymbolKind.GLOBAL_VAR,
                storage=Storage.STATIC_INTERNAL if "static" in node.storage else Storage.EXTERNAL,
                span=span,
                defined=not isExtern,
                origin=self.originFor(span),
                signature=declarationText(node),
                return_type=typeText(node.type),
                returns_pointer=isinstance(node.type, c_ast.PtrDecl),
            ), collector)

    def addTypedef(self, node):
        span = self.spanFor(node, False)
        collector = ReferenceCollector()
        collector.visit(node)
        self.addInlineTags(node.type, span, node.name)
        self.record(SymbolDecl(
            name=node.name,
            kind=SymbolKind.TYPEDEF,
            storage=Storage.EXTERNAL,
            span=span,
            origin=self.originFor(span),
        ), collector)

    def addInlineTags(self, typeNode, span, ownerName):
        """
        Records a struct/union/enum defined inside a declaration as a symbol of its own.
        Enumerators resolve to the tag, or to ownerName when the enum has no tag.
        """
        tagged = innerTagged(typeNode)
        if tagged is None or not definesBody(tagged):
            return
        owner = tagName(tagged) if tagged.name else ownerName
        if isinstance(tagged, c_ast.Enum):
            for enumerator in tagged.values.enumerators:
                self.enumerators[enumerator.name] = owner
        if tagged.name is None and ownerName is None:
            return
        if tagged.name is None and not ownerName.startswith("enum <anonymous"):
            return
        collector = ReferenceCollector()
        collector.visit(tagged)
        self.record(SymbolDecl(
            name=owner,
            kind=SymbolKind.STRUCT_UNION_ENUM,
            storage=Storage.EXTERNAL,
            span=span,
            origin=self.originFor(span),
        ), collector)

    def addResidue(self, node, span=None):
        if span is None:
            span = self.spanFor(node, False)
        self.residueCount += 1
        self.record(SymbolDecl(
            name="<residue:%d>" % span[0],
            kind=SymbolKind.MACRO_RESIDUE,
            storage=Storage.EXTERNAL,
            span=span,
            origin=self.originFor(span),
        ), ReferenceCollector())

    def describe(self, node):
        if node.coord is None:
            return "?"
        origin = self.origins[node.coord.line - 2] if node.coord.line >= 2 else None
        return "%s:%d" % origin if origin else str(node.coord.line - 1)

    def record(self, symbol, collector):
        """Adds a symbol, merging it into an earlier declaration of the same entity."""
        names = [n for n in collector.names if n in ASM_NAMES]
        if names:
            raise ParseFailed(self.describeSpan(symbol.span), "inline assembly in %s" % symbol.name)
        previous = self.byName.get(symbol.name)
        if previous is None:
            self.order.append(symbol.name)
            self.byName[symbol.name] = symbol
            self.raw[symbol.name] = (list(collector.names), set(collector.locals))
            return
        names, localNames = self.raw[symbol.name]
        self.raw[symbol.name] = (names + collector.names, localNames | collector.locals)
        storage = Storage.STATIC_INTERNAL if previous.isStatic or symbol.isStatic else Storage.EXTERNAL
        if symbol.defined and not previous.defined:
            keep, other = symbol, previous
        else:
            keep, other = previous, symbol
        redeclarations = previous.redeclarations + symbol.redeclarations + (other.span,)
        self.byName[symbol.name] = replaceFields(
            keep, storage=storage, redeclarations=tuple(sorted(set(redeclarations)))
        )

    def describeSpan(self, span):
        origin = self.origins[span[0] - 1] if span[0] >= 1 else None
        return "%s:%d" % origin if origin else str(span[0])

    def finish(self):
        """Resolves raw names into reference lists and returns symbols in source order."""
        fileScope = set(self.byName) | set(self.enumerators)
        symbols = []
        for name in self.order:
            symbol = self.byName[name]
            names, localNames = self.raw[name]
            references = [
                n for n in uniqueInOrder(names)
                if n != name
                and n not in BUILTIN_NAMES
                and not n.startswith("__builtin")
                and (n not in localNames or n in fileScope)
            ]
            symbols.append(replaceFields(symbol, references=tuple(references)))
        return symbols

def replaceFields(symbol, **changes):
    return replace(symbol, **changes)

def discover_functions(unit):
    """
    Lists the externally linked function definitions of a unit, the default targets of
    a run. main is never a target.

    Args:
        unit (TranslationUnit): a parsed unit.

    Returns:
        list: function names in source order.
    """
    return [
        sym.name for sym in unit.symbols
        if sym.kind == SymbolKind.FUNCTION and sym.defined
        and sym.storage == Storage.EXTERNAL and sym.name != "main"
    ]
