from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

tax(19.99, reduced=False)
price(99.5, currency='USD')
tax(19.99, region='US', reduced=False)
