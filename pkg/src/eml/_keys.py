import re


def camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(w.capitalize() for w in rest)


def snake(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


def camel_keys(d: dict) -> dict:
    return {camel(k): v for k, v in d.items()}


def snake_keys(d: dict) -> dict:
    return {snake(k): v for k, v in d.items()}
