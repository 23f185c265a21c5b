class BotlintError(Exception):
    pass


class LoadError(BotlintError):
    """A project container could not be turned into a raw project."""


class NotFound(LoadError):
    pass


class NoProjectEntry(LoadError):
    pass


class CorruptContainer(LoadError):
    pass


class MalformedJson(LoadError):
    def __init__(self, path, offset: int, msg: str):
        super().__init__(f"{path}: invalid JSON at byte {offset}: {msg}")
        self.path = path
        self.offset = offset


class InvalidProject(LoadError):
    """Decoded JSON does not have the project shape."""


class RegistryError(BotlintError):
    pass


class UnknownDevice(BotlintError, ValueError):
    pass


class UnknownPattern(BotlintError, KeyError):
    pass


class EmptySample(BotlintError, ValueError):
    pass


class EmptyCorpus(BotlintError):
    pass
