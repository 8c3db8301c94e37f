from hypothesis import settings

settings.register_profile("chaoslab", deadline=None, max_examples=60)
settings.load_profile("chaoslab")
