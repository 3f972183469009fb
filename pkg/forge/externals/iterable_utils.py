from collections.abc import Iterable

def flatten(someList):
    """
    Flattens a nested list into a list with singular elements. Strings are treated as
    singular elements. Example:
    [["gcc", "-O0"], ["-c", "x.c"], "-g"]
    turns into
    ["gcc", "-O0", "-c", "x.c", "-g"]

    Args:
        someList (iterable): a nested list or iterable.

    Returns:
        list: the flattened version of the list.
    """
    if isinstance(someList, Iterable) and not isinstance(someList, (str, bytes)):
        return [a for i in someList for a in flatten(i)]
    else:
        return [someList]

def uniqueInOrder(iterable):
    """Drops repeated elements, keeping the first occurrence of each.

    Args:
        iterable (iterable): some iterable of hashable elements.

    Returns:
        list: the elements in first-seen order.
    """
    seen = set()
    res = []
    for item in iterable:
        if item not in seen:
            seen.add(item)
            res.append(item)
    return res

def lowerMedian(values):
    """
    Median of a list of numbers; for an even count the lower of the two middle values is
    used, so the result is always an element of the list.

    Args:
        values (iterable): numbers.

    Returns:
        number: the lower median.
    """
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]
