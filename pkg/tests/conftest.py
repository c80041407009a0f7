from hypothesis import settings

# timing-based deadlines are meaningless on a shared single core
settings.register_profile("default", deadline=None)
settings.load_profile("default")
